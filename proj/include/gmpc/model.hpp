#pragma once

#include "gmpc/liegroup.hpp"

namespace gmpc {

using Mat32 = Eigen::Matrix<double, 3, 2>;
using Vec2u = Eigen::Vector2d;

/// Unicycle input: forward speed mu (m/s) and yaw rate omega (rad/s).
struct ControlInput
{
  double mu    = 0.0;
  double omega = 0.0;

  static ControlInput from_vector(const Vec2u & v) { return {v(0), v(1)}; }
  Vec2u vector() const { return {mu, omega}; }

  bool operator==(const ControlInput &) const = default;
};

/// Componentwise input box [lower, upper].
struct InputBounds
{
  ControlInput lower{-1e9, -1e9};
  ControlInput upper{1e9, 1e9};

  bool valid() const { return lower.mu <= upper.mu && lower.omega <= upper.omega; }
  bool contains(const ControlInput & u) const
  {
    return lower.mu <= u.mu && u.mu <= upper.mu && lower.omega <= u.omega && u.omega <= upper.omega;
  }
};

enum class Linearization { proposed, naive };

enum class PlantMode { group_exact, coordinate_euler };

/// Continuous-time linear error model: psi_dot = A psi + B u + c.
struct LinearizedDynamics
{
  Mat3 A = Mat3::Zero();
  Mat32 B = Mat32::Zero();
  Vec3 c = Vec3::Zero();
};

/// One Euler step: psi_{k+1} = Ak psi_k + Bk u_k + ck.
struct DiscreteDynamics
{
  Mat3 Ak = Mat3::Identity();
  Mat32 Bk = Mat32::Zero();
  Vec3 ck = Vec3::Zero();
  double dt = 0.0;
};

struct ErrorState
{
  Pose pose;  ///< Xd^-1 X
  Twist psi;  ///< Log of pose
  bool branch_boundary = false;
};

/// C(0): maps (mu, omega) to the body twist (mu, 0, omega).
Mat32 input_matrix();

Twist input_to_twist(const ControlInput & u);

/// Constant-twist step. group_exact composes with exp(z dt); coordinate_euler
/// advances (x, y, theta) with a forward Euler step of the unicycle model.
Pose integrate_twist(const Pose & x, const Twist & z, double dt, PlantMode mode = PlantMode::group_exact);

Pose plant_step(const Pose & x, const ControlInput & u, double dt, PlantMode mode = PlantMode::group_exact);

ErrorState error_state(const Pose & xd, const Pose & x);

/// Psi_dot = Psi z^ - zd^ Psi, the exact error rate on SE(2).
Mat3 exact_error_rate(const Pose & psi_pose, const Twist & z, const Twist & zd);

LinearizedDynamics linearize_proposed(const Twist & zd);

/// Drops psi^ z^ and projects -zd^ psi^ back onto se(2), giving A = adm((0, 0, w_d)).
LinearizedDynamics linearize_naive(const Twist & zd);

LinearizedDynamics linearize(const Twist & zd, Linearization scheme);

/**
 * @brief What the linear model misses of the first-order error rate.
 *
 * (I + psi^) z^ - zd^ (I + psi^) minus wedge(z - zd + A psi) for the chosen
 * scheme. For the proposed scheme this is exactly psi^ (z - zd)^.
 */
Mat3 residual(const Twist & psi, const Twist & z, const Twist & zd, Linearization scheme);

/// Throws std::invalid_argument unless dt > 0.
DiscreteDynamics discretize_euler(const LinearizedDynamics & ld, double dt);

}  // namespace gmpc

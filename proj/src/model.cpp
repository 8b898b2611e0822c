#include "gmpc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace gmpc {

Mat32 input_matrix()
{
  Mat32 b;
  b << 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  return b;
}

Twist input_to_twist(const ControlInput & u) { return {u.mu, 0.0, u.omega}; }

Pose integrate_twist(const Pose & x, const Twist & z, double dt, PlantMode mode)
{
  if (!(dt > 0.0)) { throw std::invalid_argument("integration step must be positive"); }
  if (mode == PlantMode::group_exact) { return compose(x, exp(z * dt)); }

  const double c = std::cos(x.theta()), s = std::sin(x.theta());
  const Vec2 world_vel(c * z.vx - s * z.vy, s * z.vx + c * z.vy);
  const Vec2 p = x.translation() + world_vel * dt;
  return Pose(p.x(), p.y(), x.theta() + z.w * dt);
}

Pose plant_step(const Pose & x, const ControlInput & u, double dt, PlantMode mode)
{
  return integrate_twist(x, input_to_twist(u), dt, mode);
}

ErrorState error_state(const Pose & xd, const Pose & x)
{
  ErrorState e;
  e.pose = compose(inverse(xd), x);
  const LogResult l = log_checked(e.pose);
  e.psi = l.value;
  e.branch_boundary = l.branch_boundary;
  return e;
}

Mat3 exact_error_rate(const Pose & psi_pose, const Twist & z, const Twist & zd)
{
  const Mat3 psi = psi_pose.matrix();
  return psi * hat(z) - hat(zd) * psi;
}

LinearizedDynamics linearize_proposed(const Twist & zd)
{
  return {adm(zd), input_matrix(), -zd.vector()};
}

LinearizedDynamics linearize_naive(const Twist & zd)
{
  return {adm(Twist{0.0, 0.0, zd.w}), input_matrix(), -zd.vector()};
}

LinearizedDynamics linearize(const Twist & zd, Linearization scheme)
{
  return scheme == Linearization::proposed ? linearize_proposed(zd) : linearize_naive(zd);
}

Mat3 residual(const Twist & psi, const Twist & z, const Twist & zd, Linearization scheme)
{
  const Mat3 first_order = (Mat3::Identity() + hat(psi)) * hat(z) - hat(zd) * (Mat3::Identity() + hat(psi));
  const LinearizedDynamics ld = linearize(zd, scheme);
  const Vec3 rate = (z - zd).vector() + ld.A * psi.vector();
  return first_order - hat(Twist::from_vector(rate));
}

DiscreteDynamics discretize_euler(const LinearizedDynamics & ld, double dt)
{
  if (!(dt > 0.0)) { throw std::invalid_argument("discretization step must be positive"); }
  return {Mat3::Identity() + ld.A * dt, ld.B * dt, ld.c * dt, dt};
}

}  // namespace gmpc

#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gmpc/qp.hpp"
#include "gmpc/trajgen.hpp"

namespace gmpc {

struct GmpcConfig
{
  std::size_t horizon = 10;
  Mat3 Q = Vec3(10.0, 10.0, 10.0).asDiagonal();
  Mat3 Qf = Vec3(100.0, 1000.0, 100.0).asDiagonal();
  Mat2 H = Vec2(1.0, 1.0).asDiagonal();
  double dt = 0.02;
  InputBounds bounds;
  Linearization scheme = Linearization::proposed;
  QpSettings solver;
  bool warm_start = true;

  /// Throws std::invalid_argument on a bad horizon, dt, weight or bound.
  void validate() const;
};

/// Thrown when the step index lies beyond the reference.
class ReferenceExhausted : public std::out_of_range
{
public:
  using std::out_of_range::out_of_range;
};

struct StepDiagnostics
{
  Twist psi;
  std::vector<Twist> predicted_psi;  ///< T + 1 entries, first is psi
  int qp_iterations = 0;
  double kkt_residual = 0.0;
  double solve_time = 0.0;  ///< seconds, window build + condense + solve
  std::array<bool, 2> saturated{false, false};  ///< (mu, omega) at a bound
  bool solver_max_iter = false;
  bool branch_boundary = false;
};

struct StepResult
{
  ControlInput u;
  StepDiagnostics diag;
  Eigen::VectorXd uhat;  ///< full optimal deviation sequence, for warm starting
};

/// Linearizes around reference samples k .. k+T-1 (holding the last one past the end).
MpcWindow build_window(const Pose & x, const ReferenceTrajectory & traj, std::size_t k, const GmpcConfig & cfg);

/// Shift by one step, repeating the last block.
Eigen::VectorXd shift_warm_start(const Eigen::VectorXd & uhat);

/**
 * @brief One receding-horizon step.
 *
 * Returns u_0 = uhat_0 + ud_k clamped into the configured box. Throws
 * ReferenceExhausted if k is past the last reference sample.
 */
StepResult gmpc_step(
  const Pose & x, const ReferenceTrajectory & traj, std::size_t k, const GmpcConfig & cfg,
  const std::optional<Eigen::VectorXd> & warm = std::nullopt, BoxQpSolver * solver = nullptr);

/// Stateful wrapper holding the solver workspace and warm start.
class GmpcController
{
public:
  explicit GmpcController(GmpcConfig cfg);

  StepResult step(const Pose & x, const ReferenceTrajectory & traj, std::size_t k);
  void reset() { warm_.reset(); }

  const GmpcConfig & config() const { return cfg_; }

private:
  GmpcConfig cfg_;
  BoxQpSolver solver_;
  std::optional<Eigen::VectorXd> warm_;
};

struct TrackingErrors
{
  double position;  ///< ||p - p_d|| (m)
  double rotation;  ///< ||Log(R_d^-1 R)|| (rad)
};

TrackingErrors tracking_errors(const Pose & x, const Pose & xd);

}  // namespace gmpc

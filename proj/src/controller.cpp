#include "gmpc/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gmpc {

void GmpcConfig::validate() const
{
  if (horizon < 1) { throw std::invalid_argument("horizon must be at least 1"); }
  if (!(dt > 0.0)) { throw std::invalid_argument("dt must be positive"); }
  if (solver.max_iter < 1 || !(solver.tol > 0.0)) { throw std::invalid_argument("solver settings must be positive"); }
  // Weight and bound checks share the window validator.
  MpcWindow w;
  w.dyn.assign(1, discretize_euler(LinearizedDynamics{}, dt));
  w.ud.assign(1, ControlInput{});
  w.Q = Q;
  w.Qf = Qf;
  w.H = H;
  w.bounds = bounds;
  w.validate();
}

MpcWindow build_window(const Pose & x, const ReferenceTrajectory & traj, std::size_t k, const GmpcConfig & cfg)
{
  if (k >= traj.size()) {
    throw ReferenceExhausted(
      "step " + std::to_string(k) + " is past the reference end (" + std::to_string(traj.size()) + " samples)");
  }
  MpcWindow w;
  w.psi0 = error_state(traj[k].xd, x).psi;
  w.dyn.reserve(cfg.horizon);
  w.ud.reserve(cfg.horizon);
  for (std::size_t j = 0; j < cfg.horizon; ++j) {
    const TrajectorySample & s = traj.hold(k + j);
    w.dyn.push_back(discretize_euler(linearize(s.zd, cfg.scheme), cfg.dt));
    w.ud.push_back(s.ud);
  }
  w.Q = cfg.Q;
  w.Qf = cfg.Qf;
  w.H = cfg.H;
  w.bounds = cfg.bounds;
  return w;
}

Eigen::VectorXd shift_warm_start(const Eigen::VectorXd & uhat)
{
  const Eigen::Index n = uhat.size();
  Eigen::VectorXd out(n);
  if (n < 2) { return uhat; }
  out.head(n - 2) = uhat.tail(n - 2);
  out.tail<2>() = uhat.tail<2>();
  return out;
}

StepResult gmpc_step(
  const Pose & x, const ReferenceTrajectory & traj, std::size_t k, const GmpcConfig & cfg,
  const std::optional<Eigen::VectorXd> & warm, BoxQpSolver * solver)
{
  const auto start = std::chrono::steady_clock::now();

  MpcWindow w = build_window(x, traj, k, cfg);
  const ErrorState err = error_state(traj[k].xd, x);
  const BoxQp qp = condense(w);

  BoxQpSolver local;
  BoxQpSolver & s = solver ? *solver : local;
  const QpSolution sol = s.solve(qp, cfg.solver, warm);

  const auto stop = std::chrono::steady_clock::now();

  StepResult r;
  r.uhat = sol.uhat;
  const ControlInput & ud = traj[k].ud;
  r.u.mu = std::clamp(sol.uhat(0) + ud.mu, cfg.bounds.lower.mu, cfg.bounds.upper.mu);
  r.u.omega = std::clamp(sol.uhat(1) + ud.omega, cfg.bounds.lower.omega, cfg.bounds.upper.omega);
  // The solver's iterate sits on the shifted bound exactly when saturated.
  if (sol.uhat(0) == qp.lo(0)) { r.u.mu = cfg.bounds.lower.mu; }
  if (sol.uhat(0) == qp.hi(0)) { r.u.mu = cfg.bounds.upper.mu; }
  if (sol.uhat(1) == qp.lo(1)) { r.u.omega = cfg.bounds.lower.omega; }
  if (sol.uhat(1) == qp.hi(1)) { r.u.omega = cfg.bounds.upper.omega; }

  StepDiagnostics & d = r.diag;
  d.psi = err.psi;
  d.branch_boundary = err.branch_boundary;
  d.predicted_psi = rollout(w, sol.uhat);
  d.qp_iterations = sol.iterations;
  d.kkt_residual = sol.kkt_residual;
  d.solve_time = std::chrono::duration<double>(stop - start).count();
  d.saturated = {r.u.mu == cfg.bounds.lower.mu || r.u.mu == cfg.bounds.upper.mu,
                 r.u.omega == cfg.bounds.lower.omega || r.u.omega == cfg.bounds.upper.omega};
  d.solver_max_iter = sol.status == QpStatus::max_iter;
  return r;
}

GmpcController::GmpcController(GmpcConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

StepResult GmpcController::step(const Pose & x, const ReferenceTrajectory & traj, std::size_t k)
{
  std::optional<Eigen::VectorXd> warm;
  if (cfg_.warm_start && warm_) { warm = shift_warm_start(*warm_); }
  StepResult r = gmpc_step(x, traj, k, cfg_, warm, &solver_);
  warm_ = r.uhat;
  return r;
}

TrackingErrors tracking_errors(const Pose & x, const Pose & xd)
{
  return {(x.translation() - xd.translation()).norm(),
          std::abs((xd.rotation().inverse() * x.rotation()).angle())};
}

}  // namespace gmpc

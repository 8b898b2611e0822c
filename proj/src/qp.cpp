#include "gmpc/qp.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace gmpc {

namespace {

double min_eigenvalue(const Eigen::MatrixXd & m)
{
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

void check_weight(const Eigen::MatrixXd & m, const char * name, double min_eig)
{
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument(std::string(name) + " must be finite and symmetric");
  }
  if (min_eigenvalue(m) < min_eig) {
    throw std::invalid_argument(std::string(name) + (min_eig > 0 ? " must be positive definite"
                                                                   : " must be positive semidefinite"));
  }
}

double clamp_bound(double v) { return std::clamp(v, -kInfBound, kInfBound); }

}  // namespace

void MpcWindow::validate() const
{
  if (dyn.empty()) { throw std::invalid_argument("horizon must be at least 1"); }
  if (ud.size() != dyn.size()) {
    throw std::invalid_argument(
      "dimension mismatch: " + std::to_string(dyn.size()) + " dynamics vs " + std::to_string(ud.size())
      + " reference inputs");
  }
  for (const DiscreteDynamics & d : dyn) {
    if (!(d.dt > 0.0)) { throw std::invalid_argument("dynamics step must have dt > 0"); }
  }
  check_weight(Q, "Q", -1e-10);
  check_weight(Qf, "Qf", -1e-10);
  check_weight(H, "H", 1e-12);
  if (!bounds.valid()) { throw std::invalid_argument("input bounds require lower <= upper"); }
  if (!psi0.is_finite()) { throw std::invalid_argument("initial error must be finite"); }
}

double BoxQp::objective(const Eigen::VectorXd & u) const { return 0.5 * u.dot(P * u) + q.dot(u) + constant; }

Eigen::VectorXd BoxQp::clamp(const Eigen::VectorXd & u) const { return u.cwiseMax(lo).cwiseMin(hi); }

BoxQp condense(const MpcWindow & w)
{
  w.validate();
  const Eigen::Index T = static_cast<Eigen::Index>(w.horizon());
  const Eigen::Index nx = 3 * T, nu = 2 * T;

  // Stacked psi_1..psi_T = G uhat + h
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nx, nu);
  Eigen::VectorXd h(nx);
  Vec3 prev = w.psi0.vector();
  for (Eigen::Index i = 0; i < T; ++i) {
    const DiscreteDynamics & d = w.dyn[static_cast<std::size_t>(i)];
    if (i > 0) {
      G.block(3 * i, 0, 3, 2 * i) = d.Ak * G.block(3 * (i - 1), 0, 3, 2 * i);
    }
    G.block<3, 2>(3 * i, 2 * i) = d.Bk;
    prev = d.Ak * prev + d.Bk * w.ud[static_cast<std::size_t>(i)].vector() + d.ck;
    h.segment<3>(3 * i) = prev;
  }

  Eigen::MatrixXd Qbar = Eigen::MatrixXd::Zero(nx, nx);
  Eigen::MatrixXd Hbar = Eigen::MatrixXd::Zero(nu, nu);
  for (Eigen::Index i = 0; i < T; ++i) {
    const double dt = w.dyn[static_cast<std::size_t>(i)].dt;
    Hbar.block<2, 2>(2 * i, 2 * i) = w.H * dt;
    // psi_{i+1}: running weight of the next step, or the terminal weight
    Qbar.block<3, 3>(3 * i, 3 * i) =
      i + 1 < T ? Mat3(w.Q * w.dyn[static_cast<std::size_t>(i + 1)].dt) : w.Qf;
  }

  BoxQp qp;
  const Eigen::MatrixXd QG = Qbar * G;
  qp.P = 2.0 * (G.transpose() * QG + Hbar);
  qp.P = 0.5 * (qp.P + qp.P.transpose()).eval();
  qp.q = 2.0 * QG.transpose() * h;
  const Vec3 psi0 = w.psi0.vector();
  qp.constant = h.dot(Qbar * h) + psi0.dot(w.Q * w.dyn.front().dt * psi0);

  qp.lo.resize(nu);
  qp.hi.resize(nu);
  for (Eigen::Index i = 0; i < T; ++i) {
    const ControlInput & ud = w.ud[static_cast<std::size_t>(i)];
    qp.lo(2 * i) = clamp_bound(w.bounds.lower.mu - ud.mu);
    qp.lo(2 * i + 1) = clamp_bound(w.bounds.lower.omega - ud.omega);
    qp.hi(2 * i) = clamp_bound(w.bounds.upper.mu - ud.mu);
    qp.hi(2 * i + 1) = clamp_bound(w.bounds.upper.omega - ud.omega);
  }
  return qp;
}

std::vector<Twist> rollout(const MpcWindow & w, const Eigen::VectorXd & uhat)
{
  if (uhat.size() != static_cast<Eigen::Index>(2 * w.horizon())) {
    throw std::invalid_argument("input sequence does not match the horizon");
  }
  std::vector<Twist> out;
  out.reserve(w.horizon() + 1);
  Vec3 psi = w.psi0.vector();
  out.push_back(w.psi0);
  for (std::size_t k = 0; k < w.horizon(); ++k) {
    const Vec2u u = uhat.segment<2>(2 * static_cast<Eigen::Index>(k)) + w.ud[k].vector();
    psi = w.dyn[k].Ak * psi + w.dyn[k].Bk * u + w.dyn[k].ck;
    out.push_back(Twist::from_vector(psi));
  }
  return out;
}

double kkt_residual(const BoxQp & qp, const Eigen::VectorXd & u)
{
  return (u - qp.clamp(u - (qp.P * u + qp.q))).lpNorm<Eigen::Infinity>();
}

void BoxQpSolver::cauchy_point(const BoxQp & qp)
{
  const Eigen::Index n = qp.size();
  constexpr double inf = std::numeric_limits<double>::infinity();

  g_.noalias() = qp.P * x_;
  g_ += qp.q;
  std::vector<double> brk(static_cast<std::size_t>(n), inf);
  d_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = inf;
    if (g_(i) > 0.0) {
      t = (x_(i) - qp.lo(i)) / g_(i);
    } else if (g_(i) < 0.0) {
      t = (x_(i) - qp.hi(i)) / g_(i);
    }
    brk[static_cast<std::size_t>(i)] = t;
    d_(i) = t > 0.0 ? -g_(i) : 0.0;
  }

  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = brk[static_cast<std::size_t>(i)];
    if (t > 0.0 && t < inf) { order.push_back(i); }
  }
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return brk[static_cast<std::size_t>(a)] < brk[static_cast<std::size_t>(b)];
  });

  // g_ tracks the gradient at the current point of the projected path.
  double t = 0.0;
  std::size_t next = 0;
  while (true) {
    const double t_next = next < order.size() ? brk[static_cast<std::size_t>(order[next])] : inf;
    const double slope = g_.dot(d_);
    if (slope >= 0.0) { break; }
    trial_.noalias() = qp.P * d_;
    const double curv = d_.dot(trial_);
    if (curv > 0.0 && t + (-slope / curv) < t_next) {
      x_ += (-slope / curv) * d_;
      break;
    }
    if (t_next == inf) { break; }

    const double step = t_next - t;
    x_ += step * d_;
    g_ += step * trial_;
    t = t_next;
    while (next < order.size() && brk[static_cast<std::size_t>(order[next])] == t_next) {
      const Eigen::Index i = order[next++];
      x_(i) = d_(i) < 0.0 ? qp.lo(i) : qp.hi(i);
      d_(i) = 0.0;
    }
    if (d_.isZero(0.0)) { break; }
  }
  x_ = qp.clamp(x_);
}

void BoxQpSolver::subspace_step(const BoxQp & qp)
{
  const Eigen::Index n = qp.size();
  free_.clear();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (qp.lo(i) < x_(i) && x_(i) < qp.hi(i)) { free_.push_back(static_cast<int>(i)); }
  }
  if (free_.empty()) { return; }

  const auto m = static_cast<Eigen::Index>(free_.size());
  g_.noalias() = qp.P * x_;
  g_ += qp.q;
  Eigen::MatrixXd Pff(m, m);
  Eigen::VectorXd gf(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    gf(a) = g_(free_[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < m; ++b) {
      Pff(a, b) = qp.P(free_[static_cast<std::size_t>(a)], free_[static_cast<std::size_t>(b)]);
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(Pff);
  if (llt.info() != Eigen::Success) { return; }
  const Eigen::VectorXd df = llt.solve(-gf);

  const double f0 = qp.objective(x_);
  double alpha = 1.0;
  for (int attempt = 0; attempt < 40; ++attempt, alpha *= 0.5) {
    trial_ = x_;
    for (Eigen::Index a = 0; a < m; ++a) {
      const int i = free_[static_cast<std::size_t>(a)];
      trial_(i) = std::clamp(x_(i) + alpha * df(a), qp.lo(i), qp.hi(i));
    }
    if (qp.objective(trial_) <= f0) {
      x_ = trial_;
      return;
    }
  }
}

QpSolution BoxQpSolver::solve(const BoxQp & qp, const QpSettings & settings, const std::optional<Eigen::VectorXd> & warm)
{
  const Eigen::Index n = qp.size();
  if (qp.P.rows() != n || qp.P.cols() != n || qp.lo.size() != n || qp.hi.size() != n) {
    throw std::invalid_argument("box QP dimensions are inconsistent");
  }
  if ((qp.lo.array() > qp.hi.array()).any()) { throw std::invalid_argument("box QP requires lo <= hi"); }

  x_ = warm && warm->size() == n ? qp.clamp(*warm) : qp.clamp(Eigen::VectorXd::Zero(n));

  QpSolution sol;
  double res = kkt_residual(qp, x_);
  sol.residual_trace.push_back(res);
  while (res > settings.tol && sol.iterations < settings.max_iter) {
    cauchy_point(qp);
    subspace_step(qp);
    ++sol.iterations;
    res = kkt_residual(qp, x_);
    sol.residual_trace.push_back(res);
  }
  sol.uhat = x_;
  sol.kkt_residual = res;
  sol.status = res <= settings.tol ? QpStatus::optimal : QpStatus::max_iter;
  return sol;
}

QpSolution solve(const BoxQp & qp, const QpSettings & settings, const std::optional<Eigen::VectorXd> & warm)
{
  BoxQpSolver solver;
  return solver.solve(qp, settings, warm);
}

}  // namespace gmpc

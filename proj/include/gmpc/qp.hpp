#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gmpc/model.hpp"

namespace gmpc {

/// Stand-in for an infinite bound; keeps the projection branch-free.
inline constexpr double kInfBound = 1e9;

/// One finite-horizon tracking problem over the error state.
struct MpcWindow
{
  Twist psi0;                          ///< initial error Log(Xd^-1 X)
  std::vector<DiscreteDynamics> dyn;   ///< T steps
  std::vector<ControlInput> ud;        ///< T reference inputs
  Mat3 Q = Mat3::Identity();           ///< running state weight (scaled by dt per step)
  Mat3 Qf = Mat3::Identity();          ///< terminal state weight
  Mat2 H = Mat2::Identity();           ///< input weight (scaled by dt per step)
  InputBounds bounds;

  std::size_t horizon() const { return dyn.size(); }

  /// Throws std::invalid_argument on size mismatch, non-PSD weights or an empty box.
  void validate() const;
};

/**
 * @brief min 1/2 u'Pu + q'u + constant  s.t.  lo <= u <= hi.
 *
 * The decision variable is the stacked input deviation u_k - ud_k.
 */
struct BoxQp
{
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  double constant = 0.0;

  Eigen::Index size() const { return q.size(); }
  double objective(const Eigen::VectorXd & u) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd & u) const;
};

/// Eliminates the error states by forward substitution.
BoxQp condense(const MpcWindow & w);

/// psi_0 .. psi_T under the window's linear dynamics with the given deviations.
std::vector<Twist> rollout(const MpcWindow & w, const Eigen::VectorXd & uhat);

/// || u - clamp(u - (P u + q), lo, hi) ||_inf
double kkt_residual(const BoxQp & qp, const Eigen::VectorXd & u);

enum class QpStatus { optimal, max_iter };

struct QpSettings
{
  double tol = 1e-8;
  int max_iter = 200;
};

struct QpSolution
{
  Eigen::VectorXd uhat;
  int iterations = 0;
  double kkt_residual = 0.0;
  QpStatus status = QpStatus::max_iter;
  /// KKT residual of every accepted iterate, starting with the initial point.
  std::vector<double> residual_trace;
};

/**
 * @brief Dense solver for strictly convex box-constrained QPs.
 *
 * Each iteration takes the exact minimizer along the projected-gradient path
 * (Cauchy point), then a Newton step on the variables left free, projected
 * back onto the box with backtracking. Iterates are always feasible.
 *
 * Owns its scratch space: one instance per thread.
 */
class BoxQpSolver
{
public:
  QpSolution solve(const BoxQp & qp, const QpSettings & settings = {},
                   const std::optional<Eigen::VectorXd> & warm = std::nullopt);

private:
  void cauchy_point(const BoxQp & qp);
  void subspace_step(const BoxQp & qp);

  Eigen::VectorXd x_, g_, d_, trial_;
  std::vector<int> free_;
};

QpSolution solve(const BoxQp & qp, const QpSettings & settings = {},
                 const std::optional<Eigen::VectorXd> & warm = std::nullopt);

}  // namespace gmpc

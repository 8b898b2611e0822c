#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gmpc/controller.hpp"

namespace gmpc {

/// Closed-loop experiment definition.
struct SimScenario
{
  ReferenceTrajectory traj;
  Pose init_pose;
  GmpcConfig cfg;
  std::size_t steps = 0;
  /// Std of zero-mean Gaussian noise added to the applied body twist (vx, vy, w).
  Vec3 noise_std = Vec3::Zero();
  PlantMode plant_mode = PlantMode::group_exact;
  std::uint64_t seed = 0;
  /// Stream index for the noise generator (Monte-Carlo run index).
  std::uint64_t stream = 0;
  /// Keep measured solve times in the records; off keeps results reproducible.
  bool record_timing = false;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct SimRecord
{
  double t = 0.0;
  Pose pose;
  ControlInput u;
  double ep = 0.0;
  double eR = 0.0;
  Twist psi;
  int qp_iters = 0;
  double kkt = 0.0;
  double solve_time = 0.0;

  bool operator==(const SimRecord &) const = default;
};

struct SimSummary
{
  double max_ep = 0.0, mean_ep = 0.0, steady_ep = 0.0;
  double max_eR = 0.0, mean_eR = 0.0, steady_eR = 0.0;
  std::size_t saturated_mu = 0, saturated_omega = 0;
  std::size_t bound_violations = 0;
  double solve_time_median = 0.0, solve_time_p95 = 0.0, solve_time_max = 0.0;

  bool operator==(const SimSummary &) const = default;
};

struct SimResult
{
  std::vector<SimRecord> records;
  SimSummary summary;
  bool failed = false;
  std::string failure;
};

/// Fraction of the run, counted from the end, that defines steady state.
inline constexpr double kSteadyStateFraction = 0.25;

/// Pure function of the records; saturation means u equals a bound exactly.
SimSummary summarize(const std::vector<SimRecord> & records, const InputBounds & bounds);

/// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

SimResult run(const SimScenario & s);

/// Random initial poses: position uniform in a box, heading uniform in a range.
struct InitSampler
{
  Vec2 pos_lo{-0.2, -0.2};
  Vec2 pos_hi{0.2, 0.2};
  double heading_lo = -0.5235987755982988;  // -pi/6
  double heading_hi = 0.0;
};

/// Initial pose of Monte-Carlo run `run`; depends only on (seed, run).
Pose sample_initial_pose(const InitSampler & sampler, std::uint64_t seed, std::uint64_t run);

struct EnvelopeRow
{
  double t = 0.0;
  double ep_min = 0.0, ep_median = 0.0, ep_max = 0.0;
  double eR_min = 0.0, eR_median = 0.0, eR_max = 0.0;

  bool operator==(const EnvelopeRow &) const = default;
};

struct MonteCarloResult
{
  std::vector<SimResult> runs;
  std::vector<Pose> initial_poses;
  /// Per-step envelope over the successful runs.
  std::vector<EnvelopeRow> envelope;
  std::size_t failures = 0;
};

std::vector<EnvelopeRow> envelope(const std::vector<SimResult> & runs);

/// Runs are independent; with threads > 1 they execute concurrently and are
/// merged in run-index order.
MonteCarloResult monte_carlo(
  const SimScenario & base, std::size_t runs, const InitSampler & sampler, std::uint64_t seed,
  unsigned threads = 1);

inline constexpr const char * kResultCsvHeader =
  "t,x,y,theta,mu,omega,ep,eR,psix,psiy,psitheta,qp_iters,kkt,solve_time";

inline constexpr const char * kEnvelopeCsvHeader = "t,ep_min,ep_median,ep_max,eR_min,eR_median,eR_max";

void write_result_csv(std::ostream & os, const std::vector<SimRecord> & records);
std::vector<SimRecord> read_result_csv(std::istream & is);

void write_envelope_csv(std::ostream & os, const std::vector<EnvelopeRow> & rows);

/// Throws std::runtime_error naming the path on I/O failure.
void export_csv(const SimResult & r, const std::filesystem::path & path);
std::vector<SimRecord> load_result_csv(const std::filesystem::path & path);

}  // namespace gmpc

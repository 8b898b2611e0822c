#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "gmpc/simkit.hpp"

namespace gmpc {
namespace {

constexpr double kPi = std::numbers::pi;

SimScenario circle(double seconds = 30.0)
{
  SimScenario s;
  const auto steps = static_cast<std::size_t>(std::llround(seconds / 0.02));
  s.traj = gen_constant_twist({0.2, 0.196}, 0.02, steps);
  s.init_pose = Pose(-0.06, -0.06, 0.0);
  s.cfg.bounds = {{-0.22, -2.84}, {0.22, 2.84}};
  s.steps = s.traj.size();
  return s;
}

std::string result_csv(const SimResult & r)
{
  std::ostringstream os;
  write_result_csv(os, r.records);
  return os.str();
}

TEST(Scenario, Validation)
{
  SimScenario s = circle(1.0);
  EXPECT_NO_THROW(s.validate());
  SimScenario zero = s;
  zero.steps = 0;
  EXPECT_THROW(zero.validate(), std::invalid_argument);
  EXPECT_THROW(run(zero), std::invalid_argument);
  SimScenario too_long = s;
  too_long.steps = s.traj.size() + 1;
  EXPECT_THROW(too_long.validate(), std::invalid_argument);
  SimScenario negative_noise = s;
  negative_noise.noise_std = Vec3(0.0, -0.1, 0.0);
  EXPECT_THROW(negative_noise.validate(), std::invalid_argument);
  SimScenario dt_mismatch = s;
  dt_mismatch.cfg.dt = 0.01;
  EXPECT_THROW(dt_mismatch.validate(), std::invalid_argument);
}

TEST(Run, FixedPointOnReference)
{
  SimScenario s = circle(10.0);
  s.init_pose = s.traj[0].xd;
  const SimResult r = run(s);
  ASSERT_FALSE(r.failed);
  ASSERT_EQ(r.records.size(), s.steps);
  EXPECT_LT(r.summary.max_ep, 1e-6);
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    EXPECT_NEAR(r.records[k].u.mu, s.traj[k].ud.mu, 1e-7);
    EXPECT_NEAR(r.records[k].u.omega, s.traj[k].ud.omega, 1e-7);
  }
}

TEST(Run, CircleConvergesWithinTenSeconds)
{
  const SimResult r = run(circle(30.0));
  ASSERT_FALSE(r.failed);
  for (const SimRecord & rec : r.records) {
    if (rec.t >= 10.0) {
      EXPECT_LT(rec.ep, 1e-3) << rec.t;
      EXPECT_LT(rec.eR, 1e-3) << rec.t;
    }
  }
  EXPECT_EQ(r.summary.bound_violations, 0u);
}

TEST(Run, NaiveSchemeLeavesLargerSteadyError)
{
  SimScenario naive = circle(30.0);
  naive.cfg.scheme = Linearization::naive;
  const SimResult p = run(circle(30.0)), n = run(naive);
  EXPECT_GE(n.summary.steady_ep, 5.0 * p.summary.steady_ep);
}

TEST(Run, FigureEightWithinScoutBounds)
{
  SimScenario s;
  s.traj = gen_flat({1.0, 0.5, kPi / 10, kPi / 5, 0.0}, 0.02, 1000);
  s.init_pose = s.traj[0].xd;
  s.cfg.bounds = {{-3.0, -2.523}, {3.0, 2.523}};
  s.steps = s.traj.size();
  const SimResult r = run(s);
  ASSERT_FALSE(r.failed);
  EXPECT_EQ(r.summary.bound_violations, 0u);
  EXPECT_LT(r.summary.max_ep, 0.05);
}

TEST(Run, GroupPlantStaysOnManifold)
{
  SimScenario s = circle(30.0);
  s.noise_std = Vec3(0.01, 0.0, 0.02);
  const SimResult r = run(s);
  for (const SimRecord & rec : r.records) {
    const Mat2 R = rec.pose.rotation().matrix();
    EXPECT_LT((R.transpose() * R - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Run, DeterministicUnderSeed)
{
  SimScenario s = circle(5.0);
  s.noise_std = Vec3(0.01, 0.005, 0.02);
  s.seed = 99;
  const SimResult a = run(s), b = run(s);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(result_csv(a), result_csv(b));
  SimScenario other = s;
  other.seed = 100;
  EXPECT_NE(run(other).records, a.records);
  SimScenario other_stream = s;
  other_stream.stream = 1;
  EXPECT_NE(run(other_stream).records, a.records);
}

TEST(Run, CoordinateEulerPlant)
{
  SimScenario s = circle(10.0);
  s.traj = gen_constant_twist({0.2, 0.196}, 0.02, 500, IntegrationMode::euler);
  s.plant_mode = PlantMode::coordinate_euler;
  const SimResult r = run(s);
  ASSERT_FALSE(r.failed);
  EXPECT_LT(r.records.back().ep, 1e-2);
}

TEST(Run, ControllerFailureGivesPartialResult)
{
  SimScenario s = circle(1.0);
  s.init_pose = Pose(std::nan(""), 0.0, 0.0);
  const SimResult r = run(s);
  EXPECT_TRUE(r.failed);
  EXPECT_FALSE(r.failure.empty());
  EXPECT_LT(r.records.size(), s.steps);
}

TEST(Summary, RecomputableFromRecords)
{
  SimScenario s = circle(10.0);
  s.noise_std = Vec3(0.01, 0.0, 0.02);
  const SimResult r = run(s);
  EXPECT_EQ(summarize(r.records, s.cfg.bounds), r.summary);
  std::istringstream is(result_csv(r));
  EXPECT_EQ(summarize(read_result_csv(is), s.cfg.bounds), r.summary);
}

TEST(Summary, SteadyStateIsLastQuarter)
{
  std::vector<SimRecord> recs(8);
  for (std::size_t i = 0; i < recs.size(); ++i) { recs[i].ep = static_cast<double>(i); }
  const SimSummary s = summarize(recs, {{-1, -1}, {1, 1}});
  EXPECT_EQ(s.steady_ep, 6.5);
  EXPECT_EQ(s.mean_ep, 3.5);
  EXPECT_EQ(s.max_ep, 7.0);
  recs.resize(5);  // ceil(1.25) = 2 records
  EXPECT_EQ(summarize(recs, {{-1, -1}, {1, 1}}).steady_ep, 3.5);
}

TEST(Summary, SaturationAndViolations)
{
  std::vector<SimRecord> recs(3);
  recs[0].u = {0.22, 0.0};
  recs[1].u = {0.1, -2.84};
  recs[2].u = {0.3, 0.0};
  const SimSummary s = summarize(recs, {{-0.22, -2.84}, {0.22, 2.84}});
  EXPECT_EQ(s.saturated_mu, 1u);
  EXPECT_EQ(s.saturated_omega, 1u);
  EXPECT_EQ(s.bound_violations, 1u);
}

TEST(Quantile, LinearInterpolation)
{
  EXPECT_EQ(quantile({3.0, 1.0, 2.0}, 0.5), 2.0);
  EXPECT_EQ(quantile({4.0, 1.0, 2.0, 3.0}, 0.5), 2.5);
  EXPECT_EQ(quantile({1.0, 2.0}, 1.0), 2.0);
  EXPECT_EQ(quantile({}, 0.5), 0.0);
}

TEST(Csv, RoundtripAndSchema)
{
  SimScenario s = circle(2.0);
  s.noise_std = Vec3(0.01, 0.0, 0.02);
  const SimResult r = run(s);
  const std::string text = result_csv(r);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x,y,theta,mu,omega,ep,eR,psix,psiy,psitheta,qp_iters,kkt,solve_time");
  std::istringstream lines(text);
  for (std::string l; std::getline(lines, l);) {
    EXPECT_EQ(std::count(l.begin(), l.end(), ','), 13);
  }
  std::istringstream is(text);
  EXPECT_EQ(read_result_csv(is), r.records);

  const auto path = std::filesystem::temp_directory_path() / "gmpc_simkit_roundtrip.csv";
  export_csv(r, path);
  EXPECT_EQ(load_result_csv(path), r.records);
  std::filesystem::remove(path);
}

TEST(Csv, IoErrorsNameThePath)
{
  const SimResult r = run(circle(0.1));
  try {
    export_csv(r, "/nonexistent-dir/result.csv");
    FAIL() << "expected an I/O error";
  } catch (const std::runtime_error & e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/result.csv"), std::string::npos);
  }
  std::istringstream bad("t,x\n1,2\n");
  EXPECT_THROW(read_result_csv(bad), CsvError);
}

TEST(Csv, TimingColumnIsZeroUnlessRequested)
{
  SimScenario s = circle(1.0);
  for (const SimRecord & rec : run(s).records) { EXPECT_EQ(rec.solve_time, 0.0); }
  s.record_timing = true;
  double total = 0.0;
  for (const SimRecord & rec : run(s).records) { total += rec.solve_time; }
  EXPECT_GT(total, 0.0);
}

TEST(InitialPoses, KeyedBySeedAndRun)
{
  const InitSampler sampler;
  EXPECT_EQ(sample_initial_pose(sampler, 7, 3), sample_initial_pose(sampler, 7, 3));
  EXPECT_NE(sample_initial_pose(sampler, 7, 3), sample_initial_pose(sampler, 7, 4));
  EXPECT_NE(sample_initial_pose(sampler, 7, 3), sample_initial_pose(sampler, 8, 3));
  for (std::uint64_t i = 0; i < 500; ++i) {
    const Pose p = sample_initial_pose(sampler, 1, i);
    EXPECT_GE(p.x(), -0.2);
    EXPECT_LE(p.x(), 0.2);
    EXPECT_GE(p.y(), -0.2);
    EXPECT_LE(p.y(), 0.2);
    EXPECT_GE(p.theta(), -kPi / 6 - 1e-15);
    EXPECT_LE(p.theta(), 0.0);
  }
}

TEST(MonteCarlo, SingleRunEnvelopeEqualsRun)
{
  const SimScenario base = circle(5.0);
  const MonteCarloResult mc = monte_carlo(base, 1, InitSampler{}, 5);
  ASSERT_EQ(mc.runs.size(), 1u);
  ASSERT_EQ(mc.envelope.size(), mc.runs[0].records.size());
  for (std::size_t k = 0; k < mc.envelope.size(); ++k) {
    const SimRecord & r = mc.runs[0].records[k];
    const EnvelopeRow & e = mc.envelope[k];
    EXPECT_EQ(e.t, r.t);
    EXPECT_EQ(e.ep_min, r.ep);
    EXPECT_EQ(e.ep_median, r.ep);
    EXPECT_EQ(e.ep_max, r.ep);
    EXPECT_EQ(e.eR_median, r.eR);
  }
  EXPECT_THROW(monte_carlo(base, 0, InitSampler{}, 5), std::invalid_argument);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults)
{
  SimScenario base = circle(3.0);
  base.noise_std = Vec3(0.01, 0.0, 0.01);
  const MonteCarloResult a = monte_carlo(base, 8, InitSampler{}, 3, 1);
  const MonteCarloResult b = monte_carlo(base, 8, InitSampler{}, 3, 4);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) { EXPECT_EQ(a.runs[i].records, b.runs[i].records); }
  EXPECT_EQ(a.envelope, b.envelope);
  EXPECT_EQ(a.initial_poses, b.initial_poses);
}

TEST(MonteCarlo, FailedRunsExcludedFromEnvelope)
{
  SimResult good;
  good.records.resize(3);
  for (std::size_t k = 0; k < 3; ++k) { good.records[k].ep = 1.0; }
  SimResult bad = good;
  bad.failed = true;
  for (SimRecord & r : bad.records) { r.ep = 100.0; }
  const auto env = envelope({good, bad});
  ASSERT_EQ(env.size(), 3u);
  EXPECT_EQ(env[0].ep_max, 1.0);
  EXPECT_TRUE(envelope({bad}).empty());
}

TEST(MonteCarlo, MedianErrorDecaysOnCircle)
{
  const MonteCarloResult mc = monte_carlo(circle(30.0), 50, InitSampler{}, 7);
  ASSERT_EQ(mc.failures, 0u);
  // Below the QP tolerance the median wanders at the 1e-9 m level; above it the decay is monotone.
  const double floor = GmpcConfig{}.solver.tol;
  for (std::size_t k = 1; k < mc.envelope.size(); ++k) {
    if (mc.envelope[k].t > 2.0 && mc.envelope[k - 1].ep_median > floor) {
      EXPECT_LE(mc.envelope[k].ep_median, mc.envelope[k - 1].ep_median) << mc.envelope[k].t;
    }
  }
  std::ostringstream a, b;
  write_envelope_csv(a, mc.envelope);
  write_envelope_csv(b, monte_carlo(circle(30.0), 50, InitSampler{}, 7).envelope);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "t,ep_min,ep_median,ep_max,eR_min,eR_median,eR_max");
}

}  // namespace
}  // namespace gmpc

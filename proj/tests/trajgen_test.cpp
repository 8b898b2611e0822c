#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gmpc/trajgen.hpp"

namespace gmpc {
namespace {

constexpr double kPi = std::numbers::pi;

void expect_invariants(const ReferenceTrajectory & traj, double tol = 1e-9)
{
  for (std::size_t k = 0; k < traj.size(); ++k) {
    EXPECT_EQ(traj[k].t, static_cast<double>(k) * traj.dt());
    EXPECT_EQ(traj[k].zd, input_to_twist(traj[k].ud));
    if (k + 1 < traj.size()) {
      const Pose next = compose(traj[k].xd, exp(traj[k].zd * traj.dt()));
      EXPECT_LT((next.matrix() - traj[k + 1].xd.matrix()).cwiseAbs().maxCoeff(), tol) << k;
    }
  }
}

std::string replace_line(const std::string & text, std::size_t line, const std::string & replacement)
{
  std::istringstream is(text);
  std::ostringstream os;
  std::string l;
  for (std::size_t i = 1; std::getline(is, l); ++i) { os << (i == line ? replacement : l) << '\n'; }
  return os.str();
}

std::string to_csv(const ReferenceTrajectory & traj)
{
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  return os.str();
}

TEST(ConstantTwist, Stationary)
{
  const ReferenceTrajectory traj = gen_constant_twist({0, 0}, 0.02, 50);
  ASSERT_EQ(traj.size(), 51u);
  for (const TrajectorySample & s : traj.samples()) { EXPECT_EQ(s.xd, Pose::identity()); }
}

TEST(ConstantTwist, StraightLine)
{
  const ReferenceTrajectory traj = gen_constant_twist({1, 0}, 0.1, 10);
  EXPECT_EQ(traj.samples().back().xd.theta(), 0.0);
  EXPECT_NEAR(traj.samples().back().xd.x(), 1.0, 1e-15);
  EXPECT_EQ(traj.samples().back().xd.y(), 0.0);
  expect_invariants(traj);
}

TEST(ConstantTwist, CircleRadius)
{
  const ReferenceTrajectory traj = gen_constant_twist({0.2, 0.196}, 0.02, 2000);
  const Vec2 center(0.0, 0.2 / 0.196);
  for (const TrajectorySample & s : traj.samples()) {
    EXPECT_NEAR((s.xd.translation() - center).norm(), 0.2 / 0.196, 1e-9);
  }
  EXPECT_NEAR(0.2 / 0.196, 1.0204081632653061, 1e-15);
  expect_invariants(traj);
}

TEST(ConstantTwist, ClosesAfterOnePeriod)
{
  // dt chosen so that exactly 1000 steps make one revolution
  const double w = 0.196;
  const double dt = 2 * kPi / (w * 1000);
  const ReferenceTrajectory traj = gen_constant_twist({0.2, w}, dt, 1000);
  EXPECT_LT(log(traj.samples().back().xd).vector().norm(), 1e-6);
}

TEST(ConstantTwist, ClosureGapOnTheDefaultGrid)
{
  // 2 pi / (0.196 * 0.02) is not an integer; the leftover is a pure arc of the same circle.
  const double dt = 0.02, w = 0.196;
  const std::size_t n = static_cast<std::size_t>(std::llround(2 * kPi / (w * dt)));
  ASSERT_EQ(n, 1603u);
  const ReferenceTrajectory traj = gen_constant_twist({0.2, w}, dt, n);
  const double overshoot = static_cast<double>(n) * dt - 2 * kPi / w;
  const Twist expected = Twist{0.2, 0.0, w} * overshoot;
  EXPECT_LT((log(traj.samples().back().xd) - expected).vector().cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ConstantTwist, EulerModeFollowsCoordinates)
{
  const ReferenceTrajectory traj = gen_constant_twist({0.2, 0.196}, 0.02, 3, IntegrationMode::euler);
  EXPECT_NEAR(traj[1].xd.x(), 0.004, 1e-15);
  EXPECT_EQ(traj[1].xd.y(), 0.0);
  EXPECT_NEAR(traj[2].xd.y(), 0.004 * std::sin(0.00392), 1e-15);
}

TEST(ConstantTwist, RejectsBadArguments)
{
  EXPECT_THROW(gen_constant_twist({1, 0}, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(gen_constant_twist({1, 0}, 0.1, 0), std::invalid_argument);
}

TEST(ReferenceTrajectory, RejectsBrokenInvariants)
{
  std::vector<TrajectorySample> samples = gen_constant_twist({0.2, 0.1}, 0.02, 3).samples();
  auto off_grid = samples;
  off_grid[2].t = 0.041;
  EXPECT_THROW(ReferenceTrajectory(0.02, off_grid), std::invalid_argument);
  auto inconsistent = samples;
  inconsistent[1].zd.vy = 1e-3;
  EXPECT_THROW(ReferenceTrajectory(0.02, inconsistent), std::invalid_argument);
}

TEST(ReferenceTrajectory, HoldsLastSample)
{
  const ReferenceTrajectory traj = gen_constant_twist({0.2, 0.1}, 0.02, 3);
  EXPECT_EQ(traj.hold(2), traj[2]);
  EXPECT_EQ(traj.hold(3), traj[3]);
  EXPECT_EQ(traj.hold(100), traj[3]);
  EXPECT_THROW(ReferenceTrajectory().hold(0), std::out_of_range);
}

TEST(Flat, CircleGivesConstantInputs)
{
  const double r = 0.8, w0 = 0.5;
  const Lissajous circle{r, r, w0, w0, kPi / 2};
  const ReferenceTrajectory traj = gen_flat(circle, 0.02, 1000);
  for (const TrajectorySample & s : traj.samples()) {
    EXPECT_NEAR(s.ud.mu, r * w0, 1e-9);
    EXPECT_NEAR(s.ud.omega, w0, 1e-9);
  }
  // re-integrated poses stay on the analytic circle
  for (std::size_t k = 0; k < traj.size(); k += 100) {
    EXPECT_NEAR(traj[k].xd.translation().norm(), r, 1e-9);
  }
  expect_invariants(traj);
}

TEST(Flat, RejectsDegeneratePath)
{
  const Lissajous line{1.0, 0.0, 0.5, 1.0, 0.0};
  try {
    gen_flat(line, 0.02, 1000);
    FAIL() << "expected DegeneratePathError";
  } catch (const DegeneratePathError & e) {
    // turning point at t = pi / (2 * 0.5) = pi; first grid point past it is 3.16
    EXPECT_NEAR(e.time(), 3.16, 1e-12);
  }
  EXPECT_THROW(flat_inputs(line, kPi), DegeneratePathError);
}

TEST(Flat, FigureEightTurnsBothWays)
{
  const double w0 = kPi / 10;
  const Lissajous eight{1.0, 0.5, w0, 2 * w0, 0.0};
  const double period = 2 * kPi / w0;
  const double dt = 0.02;
  const std::size_t n = static_cast<std::size_t>(std::llround(period / dt));
  const ReferenceTrajectory traj = gen_flat(eight, dt, n);

  // Independent curvature numerator: x' = w0 cos(w0 t), y' = w0 cos(2 w0 t).
  auto numerator = [&](double t) {
    const double xd = w0 * std::cos(w0 * t), yd = w0 * std::cos(2 * w0 * t);
    const double xdd = -w0 * w0 * std::sin(w0 * t), ydd = -2 * w0 * w0 * std::sin(2 * w0 * t);
    return xd * ydd - yd * xdd;
  };
  int oracle_changes = 0;
  const int dense = 200000;
  // start just off t = 0, where the numerator vanishes
  double prev = numerator(0.5 * period / dense);
  for (int i = 1; i < dense; ++i) {
    const double v = numerator((i + 0.5) * period / dense);
    if ((v > 0) != (prev > 0)) { ++oracle_changes; }
    prev = v;
  }
  EXPECT_EQ(oracle_changes, 1);  // plus the one at t = 0 / t = period

  int changes = 0;
  for (std::size_t k = 1; k + 2 < traj.size(); ++k) {
    if ((traj[k + 1].ud.omega > 0) != (traj[k].ud.omega > 0)) { ++changes; }
  }
  // wrap-around change at the period boundary
  if ((traj[1].ud.omega > 0) != (traj[traj.size() - 2].ud.omega > 0)) { ++changes; }
  EXPECT_EQ(changes, 2);
  expect_invariants(traj);
}

TEST(Flat, ReplayReproducesPoses)
{
  const Lissajous eight{1.0, 0.5, kPi / 10, kPi / 5, 0.0};
  const ReferenceTrajectory traj = gen_flat(eight, 0.02, 1000);
  Pose x = traj[0].xd;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    x = plant_step(x, traj[k].ud, traj.dt());
    EXPECT_LT((x.matrix() - traj[k + 1].xd.matrix()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Flat, BoundViolationReport)
{
  const Lissajous eight{1.0, 0.5, kPi / 10, kPi / 5, 0.0};
  const ReferenceTrajectory traj = gen_flat(eight, 0.02, 1000);
  EXPECT_TRUE(find_bound_violations(traj, {{-3.0, -2.523}, {3.0, 2.523}}).empty());
  const auto v = find_bound_violations(traj, {{-0.22, -2.84}, {0.22, 2.84}});
  ASSERT_FALSE(v.empty());
  EXPECT_GT(v.front().ud.mu, 0.22);
}

TEST(Csv, RoundtripIsBitExact)
{
  const ReferenceTrajectory circle = gen_constant_twist({0.2, 0.196}, 0.02, 99);
  ASSERT_EQ(circle.size(), 100u);
  std::istringstream is(to_csv(circle));
  EXPECT_EQ(read_trajectory_csv(is), circle);

  const ReferenceTrajectory eight = gen_flat({1.0, 0.5, kPi / 10, kPi / 5, 0.0}, 0.02, 500);
  std::istringstream is2(to_csv(eight));
  EXPECT_EQ(read_trajectory_csv(is2), eight);
}

TEST(Csv, FileRoundtrip)
{
  const ReferenceTrajectory circle = gen_constant_twist({0.2, 0.196}, 0.02, 99);
  const auto path = std::filesystem::temp_directory_path() / "gmpc_trajgen_roundtrip.csv";
  save_csv(circle, path);
  EXPECT_EQ(load_csv(path), circle);
  std::filesystem::remove(path);
  EXPECT_THROW(load_csv(path), std::runtime_error);
}

TEST(Csv, HeaderAndShape)
{
  const std::string text = to_csv(gen_constant_twist({0.2, 0.196}, 0.02, 4));
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x,y,theta,vx,vy,w,mu,omega");
  std::istringstream bad_header("t,x,y\n0,0,0\n");
  EXPECT_THROW(read_trajectory_csv(bad_header), CsvError);
}

TEST(Csv, ShuffledTimestampsReportFirstBadRow)
{
  const std::string text = to_csv(gen_constant_twist({0.2, 0.196}, 0.02, 9));
  std::istringstream is(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(is, l);) { lines.push_back(l); }
  std::swap(lines[4], lines[6]);  // rows for t = 0.06 and t = 0.10
  std::ostringstream os;
  for (const auto & l : lines) { os << l << '\n'; }
  std::istringstream shuffled(os.str());
  try {
    read_trajectory_csv(shuffled);
    FAIL() << "expected CsvError";
  } catch (const CsvError & e) {
    // line 5 holds t = 0.10 where t = 0.06 belongs
    EXPECT_EQ(e.line(), 5u);
    EXPECT_NE(std::string(e.what()).find("order"), std::string::npos);
  }
}

TEST(Csv, RejectsInconsistentTwist)
{
  const std::string text = to_csv(gen_constant_twist({0.2, 0.196}, 0.02, 4));
  const std::string broken = replace_line(text, 3, "0.02,0.004,0,0.00392,0.2,0.001,0.196,0.2,0.196");
  std::istringstream is(broken);
  try {
    read_trajectory_csv(is);
    FAIL() << "expected CsvError";
  } catch (const CsvError & e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("inconsistent"), std::string::npos);
  }
}

TEST(Csv, RejectsMalformedRows)
{
  const std::string text = to_csv(gen_constant_twist({0.2, 0.196}, 0.02, 4));
  for (const std::string & row : {std::string("0.02,0.004,0,0.00392,0.2,0,0.196,0.2"),
                                  std::string("0.02,0.004,abc,0.00392,0.2,0,0.196,0.2,0.196"),
                                  std::string("0.02,0.004,0,0.00392,0.2,0,0.196,0.2,0.196x")}) {
    std::istringstream is(replace_line(text, 3, row));
    try {
      read_trajectory_csv(is);
      FAIL() << row;
    } catch (const CsvError & e) {
      EXPECT_EQ(e.line(), 3u) << row;
    }
  }
}

TEST(Csv, RejectsNonUniformGrid)
{
  const std::string text = to_csv(gen_constant_twist({0.0, 0.0}, 0.02, 4));
  std::istringstream is(replace_line(text, 5, "0.07,0,0,0,0,0,0,0,0"));
  try {
    read_trajectory_csv(is);
    FAIL() << "expected CsvError";
  } catch (const CsvError & e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

}  // namespace
}  // namespace gmpc

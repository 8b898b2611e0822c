#include "gmpc/trajgen.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gmpc/csv.hpp"

namespace gmpc {

namespace {

struct PathDerivatives
{
  Vec2 p, dp, ddp;
};

PathDerivatives evaluate(const Lissajous & path, double t)
{
  const double ax = path.fx * t + path.phase;
  const double ay = path.fy * t;
  PathDerivatives d;
  d.p << path.ax * std::sin(ax), path.ay * std::sin(ay);
  d.dp << path.ax * path.fx * std::cos(ax), path.ay * path.fy * std::cos(ay);
  d.ddp << -path.ax * path.fx * path.fx * std::sin(ax), -path.ay * path.fy * path.fy * std::sin(ay);
  return d;
}

}  // namespace

ReferenceTrajectory::ReferenceTrajectory(double dt, std::vector<TrajectorySample> samples)
    : dt_(dt), samples_(std::move(samples))
{
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) { throw std::invalid_argument("trajectory dt must be positive"); }
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const TrajectorySample & s = samples_[k];
    if (s.t != static_cast<double>(k) * dt_) {
      throw std::invalid_argument("sample " + std::to_string(k) + " is off the uniform grid");
    }
    if (!(s.zd == input_to_twist(s.ud))) {
      throw std::invalid_argument("sample " + std::to_string(k) + ": zd differs from input_to_twist(ud)");
    }
  }
}

const TrajectorySample & ReferenceTrajectory::hold(std::size_t k) const
{
  if (samples_.empty()) { throw std::out_of_range("empty reference trajectory"); }
  return k < samples_.size() ? samples_[k] : samples_.back();
}

ReferenceTrajectory integrate_reference(
  const Pose & start, const std::vector<ControlInput> & ud, double dt, IntegrationMode mode)
{
  if (ud.empty()) { throw std::invalid_argument("need at least one input sample"); }
  const PlantMode plant = mode == IntegrationMode::group ? PlantMode::group_exact : PlantMode::coordinate_euler;
  std::vector<TrajectorySample> samples;
  samples.reserve(ud.size());
  Pose x = start;
  for (std::size_t k = 0; k < ud.size(); ++k) {
    samples.push_back({static_cast<double>(k) * dt, x, input_to_twist(ud[k]), ud[k]});
    if (k + 1 < ud.size()) { x = plant_step(x, ud[k], dt, plant); }
  }
  return ReferenceTrajectory(dt, std::move(samples));
}

ReferenceTrajectory gen_constant_twist(const ControlInput & ud, double dt, std::size_t steps, IntegrationMode mode)
{
  if (steps < 1) { throw std::invalid_argument("need at least one step"); }
  return integrate_reference(Pose::identity(), std::vector<ControlInput>(steps + 1, ud), dt, mode);
}

DegeneratePathError::DegeneratePathError(double t, double speed)
    : std::invalid_argument(
        "path speed " + std::to_string(speed) + " m/s below flatness threshold at t = " + std::to_string(t)),
      t_(t)
{}

ControlInput flat_inputs(const Lissajous & path, double t)
{
  const PathDerivatives d = evaluate(path, t);
  const double speed2 = d.dp.squaredNorm();
  const double speed = std::sqrt(speed2);
  if (speed < kMinFlatSpeed) { throw DegeneratePathError(t, speed); }
  return {speed, (d.dp.x() * d.ddp.y() - d.dp.y() * d.ddp.x()) / speed2};
}

ReferenceTrajectory gen_flat(const Lissajous & path, double dt, std::size_t steps, IntegrationMode mode)
{
  if (steps < 1) { throw std::invalid_argument("need at least one step"); }
  if (!(dt > 0.0)) { throw std::invalid_argument("trajectory dt must be positive"); }
  std::vector<ControlInput> ud;
  ud.reserve(steps + 1);
  Vec2 prev_vel = Vec2::Zero();
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    ud.push_back(flat_inputs(path, t));
    // A reversal between grid points means the speed passed through zero in between.
    const Vec2 vel = evaluate(path, t).dp;
    if (k > 0 && vel.dot(prev_vel) <= 0.0) { throw DegeneratePathError(t, 0.0); }
    prev_vel = vel;
  }
  const PathDerivatives d0 = evaluate(path, 0.0);
  const Pose start(d0.p.x(), d0.p.y(), std::atan2(d0.dp.y(), d0.dp.x()));
  return integrate_reference(start, ud, dt, mode);
}

std::vector<BoundViolation> find_bound_violations(const ReferenceTrajectory & traj, const InputBounds & bounds)
{
  std::vector<BoundViolation> out;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (!bounds.contains(traj[k].ud)) { out.push_back({k, traj[k].ud}); }
  }
  return out;
}

CsvError::CsvError(std::size_t line, const std::string & what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
{}

void write_trajectory_csv(std::ostream & os, const ReferenceTrajectory & traj)
{
  using csv::format_double;
  os << kTrajectoryCsvHeader << '\n';
  for (const TrajectorySample & s : traj.samples()) {
    os << format_double(s.t) << ',' << format_double(s.xd.x()) << ',' << format_double(s.xd.y()) << ','
       << format_double(s.xd.theta()) << ',' << format_double(s.zd.vx) << ',' << format_double(s.zd.vy) << ','
       << format_double(s.zd.w) << ',' << format_double(s.ud.mu) << ',' << format_double(s.ud.omega) << '\n';
  }
}

ReferenceTrajectory read_trajectory_csv(std::istream & is)
{
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line) || line != kTrajectoryCsvHeader) {
    throw CsvError(1, std::string("expected header '") + kTrajectoryCsvHeader + "'");
  }

  std::vector<TrajectorySample> samples;
  double dt = 0.0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) { continue; }
    const auto fields = csv::split(line);
    if (fields.size() != 9) {
      throw CsvError(lineno, "expected 9 fields, got " + std::to_string(fields.size()));
    }
    double v[9];
    for (std::size_t i = 0; i < 9; ++i) {
      if (!csv::parse_double(fields[i], v[i]) || !std::isfinite(v[i])) {
        throw CsvError(lineno, "malformed number in column " + std::to_string(i + 1));
      }
    }

    TrajectorySample s{v[0], Pose(v[1], v[2], v[3]), Twist{v[4], v[5], v[6]}, ControlInput{v[7], v[8]}};
    const std::size_t k = samples.size();
    if (k > 0 && s.t <= samples.back().t) { throw CsvError(lineno, "timestamp out of order"); }
    if (k == 0 && s.t != 0.0) { throw CsvError(lineno, "first timestamp must be 0"); }
    if (k == 1) { dt = s.t; }
    if (k > 1 && s.t != static_cast<double>(k) * dt) {
      // A later grid point in this slot means rows were reordered, not resampled.
      const double slot = std::round(s.t / dt);
      const bool on_grid = slot * dt == s.t;
      throw CsvError(lineno, on_grid ? "timestamp out of order: expected t = " + csv::format_double(static_cast<double>(k) * dt)
                                     : "non-uniform time grid");
    }
    if (!(s.zd == input_to_twist(s.ud))) { throw CsvError(lineno, "twist inconsistent with input (vx,vy,w) != (mu,0,omega)"); }
    samples.push_back(s);
  }
  if (samples.size() < 2) { throw CsvError(lineno, "need at least two samples"); }
  return ReferenceTrajectory(dt, std::move(samples));
}

void save_csv(const ReferenceTrajectory & traj, const std::filesystem::path & path)
{
  std::ofstream os(path);
  if (!os) { throw std::runtime_error("cannot open " + path.string() + " for writing"); }
  write_trajectory_csv(os, traj);
  if (!os) { throw std::runtime_error("write failed: " + path.string()); }
}

ReferenceTrajectory load_csv(const std::filesystem::path & path)
{
  std::ifstream is(path);
  if (!is) { throw std::runtime_error("cannot open " + path.string()); }
  return read_trajectory_csv(is);
}

}  // namespace gmpc

#include "gmpc/experiment.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace gmpc {

namespace {

using nlohmann::json;

std::string join(const std::string & parent, const std::string & key)
{
  return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const json & obj, const std::string & path, const std::set<std::string> & allowed)
{
  for (const auto & [key, value] : obj.items()) {
    if (!allowed.count(key)) { throw ConfigError(join(path, key), "unknown field"); }
  }
}

const json & require_object(const json & j, const std::string & path)
{
  if (!j.is_object()) { throw ConfigError(path, "expected an object"); }
  return j;
}

double get_number(const json & j, const std::string & path)
{
  if (!j.is_number()) { throw ConfigError(path, "expected a number"); }
  const double v = j.get<double>();
  if (!std::isfinite(v)) { throw ConfigError(path, "expected a finite number"); }
  return v;
}

std::uint64_t get_count(const json & j, const std::string & path)
{
  if (j.is_number_unsigned()) { return j.get<std::uint64_t>(); }
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) { throw ConfigError(path, "expected a non-negative integer"); }
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw ConfigError(path, "expected a non-negative integer");
}

bool get_bool(const json & j, const std::string & path)
{
  if (!j.is_boolean()) { throw ConfigError(path, "expected true or false"); }
  return j.get<bool>();
}

std::string get_string(const json & j, const std::string & path)
{
  if (!j.is_string()) { throw ConfigError(path, "expected a string"); }
  return j.get<std::string>();
}

template<int N>
Eigen::Matrix<double, N, 1> get_vector(const json & j, const std::string & path)
{
  if (!j.is_array() || j.size() != N) { throw ConfigError(path, "expected an array of " + std::to_string(N) + " numbers"); }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) { v(i) = get_number(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]"); }
  return v;
}

/// A weight is either a diagonal (N numbers) or a full N x N nested array.
template<int N>
Eigen::Matrix<double, N, N> get_weight(const json & j, const std::string & path, bool strictly_positive)
{
  Eigen::Matrix<double, N, N> m;
  if (j.is_array() && j.size() == N && j[0].is_array()) {
    for (int r = 0; r < N; ++r) {
      m.row(r) = get_vector<N>(j[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]").transpose();
    }
  } else {
    m = get_vector<N>(j, path).asDiagonal();
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) { throw ConfigError(path, "weight must be symmetric"); }
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>>(m).eigenvalues().minCoeff();
  if (strictly_positive ? min_eig < 1e-12 : min_eig < -1e-10) {
    throw ConfigError(path, strictly_positive ? "weight must be positive definite" : "weight must be positive semidefinite");
  }
  return m;
}

std::pair<double, double> get_interval(const json & j, const std::string & path)
{
  const Eigen::Vector2d v = get_vector<2>(j, path);
  if (v(0) > v(1)) { throw ConfigError(path, "lower bound exceeds upper bound"); }
  return {v(0), v(1)};
}

void parse_trajectory(const json & j, const std::string & path, ExperimentConfig & cfg)
{
  require_object(j, path);
  const std::string type = j.contains("type") ? get_string(j["type"], join(path, "type")) : "constant_twist";
  if (j.contains("duration")) {
    cfg.duration = get_number(j["duration"], join(path, "duration"));
    if (!(cfg.duration > 0.0)) { throw ConfigError(join(path, "duration"), "must be positive"); }
  }
  if (j.contains("integration")) {
    const std::string mode = get_string(j["integration"], join(path, "integration"));
    if (mode == "group") {
      cfg.integration = IntegrationMode::group;
    } else if (mode == "euler") {
      cfg.integration = IntegrationMode::euler;
    } else {
      throw ConfigError(join(path, "integration"), "expected 'group' or 'euler'");
    }
  }

  if (type == "constant_twist" || type == "circle") {
    reject_unknown(j, path, {"type", "duration", "integration", "mu", "omega"});
    ConstantTwistSpec spec;
    if (j.contains("mu")) { spec.ud.mu = get_number(j["mu"], join(path, "mu")); }
    if (j.contains("omega")) { spec.ud.omega = get_number(j["omega"], join(path, "omega")); }
    cfg.trajectory = spec;
  } else if (type == "lissajous") {
    reject_unknown(j, path, {"type", "duration", "integration", "ax", "ay", "fx", "fy", "phase"});
    Lissajous l;
    if (j.contains("ax")) { l.ax = get_number(j["ax"], join(path, "ax")); }
    if (j.contains("ay")) { l.ay = get_number(j["ay"], join(path, "ay")); }
    if (j.contains("fx")) { l.fx = get_number(j["fx"], join(path, "fx")); }
    if (j.contains("fy")) { l.fy = get_number(j["fy"], join(path, "fy")); }
    if (j.contains("phase")) { l.phase = get_number(j["phase"], join(path, "phase")); }
    cfg.trajectory = l;
  } else {
    throw ConfigError(join(path, "type"), "expected 'constant_twist', 'circle' or 'lissajous'");
  }
}

void parse_controller(const json & j, const std::string & path, GmpcConfig & c)
{
  require_object(j, path);
  reject_unknown(j, path, {"horizon", "Q", "Qf", "H", "dt", "scheme", "tol", "max_iter", "warm_start"});
  if (j.contains("horizon")) {
    c.horizon = get_count(j["horizon"], join(path, "horizon"));
    if (c.horizon < 1) { throw ConfigError(join(path, "horizon"), "must be at least 1"); }
  }
  if (j.contains("Q")) { c.Q = get_weight<3>(j["Q"], join(path, "Q"), false); }
  if (j.contains("Qf")) { c.Qf = get_weight<3>(j["Qf"], join(path, "Qf"), false); }
  if (j.contains("H")) { c.H = get_weight<2>(j["H"], join(path, "H"), true); }
  if (j.contains("dt")) {
    c.dt = get_number(j["dt"], join(path, "dt"));
    if (!(c.dt > 0.0)) { throw ConfigError(join(path, "dt"), "must be positive"); }
  }
  if (j.contains("scheme")) {
    const std::string s = get_string(j["scheme"], join(path, "scheme"));
    if (s == "proposed") {
      c.scheme = Linearization::proposed;
    } else if (s == "naive") {
      c.scheme = Linearization::naive;
    } else {
      throw ConfigError(join(path, "scheme"), "expected 'proposed' or 'naive'");
    }
  }
  if (j.contains("tol")) {
    c.solver.tol = get_number(j["tol"], join(path, "tol"));
    if (!(c.solver.tol > 0.0)) { throw ConfigError(join(path, "tol"), "must be positive"); }
  }
  if (j.contains("max_iter")) {
    const std::uint64_t n = get_count(j["max_iter"], join(path, "max_iter"));
    if (n < 1 || n > 1000000) { throw ConfigError(join(path, "max_iter"), "must be in [1, 1e6]"); }
    c.solver.max_iter = static_cast<int>(n);
  }
  if (j.contains("warm_start")) { c.warm_start = get_bool(j["warm_start"], join(path, "warm_start")); }
}

void parse_monte_carlo(const json & j, const std::string & path, ExperimentConfig & cfg)
{
  require_object(j, path);
  reject_unknown(j, path, {"runs", "position_box", "heading_range", "threads"});
  if (j.contains("runs")) { cfg.mc_runs = get_count(j["runs"], join(path, "runs")); }
  if (j.contains("position_box")) {
    const std::string p = join(path, "position_box");
    const json & box = j["position_box"];
    if (!box.is_array() || box.size() != 2) { throw ConfigError(p, "expected [[x_lo, y_lo], [x_hi, y_hi]]"); }
    cfg.sampler.pos_lo = get_vector<2>(box[0], p + "[0]");
    cfg.sampler.pos_hi = get_vector<2>(box[1], p + "[1]");
    if ((cfg.sampler.pos_lo.array() > cfg.sampler.pos_hi.array()).any()) {
      throw ConfigError(p, "lower corner exceeds upper corner");
    }
  }
  if (j.contains("heading_range")) {
    const auto [lo, hi] = get_interval(j["heading_range"], join(path, "heading_range"));
    cfg.sampler.heading_lo = lo;
    cfg.sampler.heading_hi = hi;
  }
  if (j.contains("threads")) {
    cfg.threads = static_cast<unsigned>(std::max<std::uint64_t>(1, get_count(j["threads"], join(path, "threads"))));
  }
}

}  // namespace

ConfigError::ConfigError(std::string path, const std::string & what)
    : std::runtime_error(path + ": " + what), path_(std::move(path))
{}

std::optional<Platform> platform_preset(const std::string & name)
{
  if (name == "turtlebot3") { return Platform{name, {{-0.22, -2.84}, {0.22, 2.84}}, 50.0}; }
  if (name == "scoutmini") { return Platform{name, {{-3.0, -2.523}, {3.0, 2.523}}, 50.0}; }
  return std::nullopt;
}

void apply_platform(ExperimentConfig & cfg, const std::string & name)
{
  const auto p = platform_preset(name);
  if (!p) { throw ConfigError("platform", "unknown platform '" + name + "' (expected turtlebot3 or scoutmini)"); }
  cfg.platform = p->name;
  cfg.controller.bounds = p->bounds;
  cfg.controller.dt = 1.0 / p->rate_hz;
}

ExperimentConfig parse_experiment(const std::string & text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error & e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  require_object(j, "<root>");
  reject_unknown(j, "", {"name", "trajectory", "platform", "bounds", "controller", "initial_pose", "steps", "noise",
                         "plant", "seed", "monte_carlo", "bench", "plot", "output_dir"});

  ExperimentConfig cfg;
  apply_platform(cfg, j.contains("platform") ? get_string(j["platform"], "platform") : cfg.platform);

  if (j.contains("name")) { cfg.name = get_string(j["name"], "name"); }
  if (j.contains("trajectory")) { parse_trajectory(j["trajectory"], "trajectory", cfg); }
  if (j.contains("bounds")) {
    const json & b = require_object(j["bounds"], "bounds");
    reject_unknown(b, "bounds", {"mu", "omega"});
    if (b.contains("mu")) {
      std::tie(cfg.controller.bounds.lower.mu, cfg.controller.bounds.upper.mu) = get_interval(b["mu"], "bounds.mu");
    }
    if (b.contains("omega")) {
      std::tie(cfg.controller.bounds.lower.omega, cfg.controller.bounds.upper.omega) =
        get_interval(b["omega"], "bounds.omega");
    }
  }
  if (j.contains("controller")) { parse_controller(j["controller"], "controller", cfg.controller); }
  if (j.contains("initial_pose")) {
    const Vec3 p = get_vector<3>(j["initial_pose"], "initial_pose");
    cfg.initial_pose = Pose(p(0), p(1), p(2));
  }
  if (j.contains("steps")) {
    cfg.steps = get_count(j["steps"], "steps");
    if (*cfg.steps < 1) { throw ConfigError("steps", "must be at least 1"); }
  }
  if (j.contains("noise")) {
    cfg.noise_std = get_vector<3>(j["noise"], "noise");
    if ((cfg.noise_std.array() < 0.0).any()) { throw ConfigError("noise", "standard deviations must be >= 0"); }
  }
  if (j.contains("plant")) {
    const std::string p = get_string(j["plant"], "plant");
    if (p == "group_exact") {
      cfg.plant = PlantMode::group_exact;
    } else if (p == "coordinate_euler") {
      cfg.plant = PlantMode::coordinate_euler;
    } else {
      throw ConfigError("plant", "expected 'group_exact' or 'coordinate_euler'");
    }
  }
  if (j.contains("seed")) { cfg.seed = get_count(j["seed"], "seed"); }
  if (j.contains("monte_carlo")) { parse_monte_carlo(j["monte_carlo"], "monte_carlo", cfg); }
  if (j.contains("bench")) {
    const json & b = require_object(j["bench"], "bench");
    reject_unknown(b, "bench", {"steps"});
    if (b.contains("steps")) {
      cfg.bench_steps = get_count(b["steps"], "bench.steps");
      if (cfg.bench_steps < 1) { throw ConfigError("bench.steps", "must be at least 1"); }
    }
  }
  if (j.contains("plot")) { cfg.plot = get_bool(j["plot"], "plot"); }
  if (j.contains("output_dir")) { cfg.output_dir = get_string(j["output_dir"], "output_dir"); }
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path & path)
{
  std::ifstream is(path);
  if (!is) { throw ConfigError(path.string(), "cannot read config file"); }
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_experiment(ss.str());
}

ReferenceTrajectory build_reference(const ExperimentConfig & cfg)
{
  const double dt = cfg.controller.dt;
  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / dt));
  if (steps < 1) { throw ConfigError("trajectory.duration", "shorter than one control period"); }
  if (const auto * c = std::get_if<ConstantTwistSpec>(&cfg.trajectory)) {
    return gen_constant_twist(c->ud, dt, steps, cfg.integration);
  }
  try {
    return gen_flat(std::get<Lissajous>(cfg.trajectory), dt, steps, cfg.integration);
  } catch (const DegeneratePathError & e) {
    throw ConfigError("trajectory", e.what());
  }
}

SimScenario build_scenario(const ExperimentConfig & cfg)
{
  SimScenario s;
  s.traj = build_reference(cfg);
  s.init_pose = cfg.initial_pose.value_or(s.traj[0].xd);
  s.cfg = cfg.controller;
  s.steps = cfg.steps.value_or(s.traj.size());
  if (s.steps > s.traj.size()) {
    throw ConfigError("steps", "exceeds the reference length (" + std::to_string(s.traj.size()) + " samples)");
  }
  s.noise_std = cfg.noise_std;
  s.plant_mode = cfg.plant;
  s.seed = cfg.seed;
  return s;
}

}  // namespace gmpc

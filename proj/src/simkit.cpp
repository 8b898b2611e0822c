#include "gmpc/simkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <thread>

#include "gmpc/csv.hpp"

namespace gmpc {

namespace {

constexpr std::uint32_t kInitTag = 0x1417;
constexpr std::uint32_t kNoiseTag = 0x7e55;

std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t stream, std::uint32_t tag)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), tag};
  return std::mt19937_64(seq);
}

double mean_of(const std::vector<SimRecord> & r, std::size_t from, double SimRecord::*field)
{
  double sum = 0.0;
  for (std::size_t i = from; i < r.size(); ++i) { sum += r[i].*field; }
  return sum / static_cast<double>(r.size() - from);
}

}  // namespace

void SimScenario::validate() const
{
  cfg.validate();
  if (steps < 1) { throw std::invalid_argument("scenario needs at least one step"); }
  if (steps > traj.size()) {
    throw std::invalid_argument(
      "scenario steps (" + std::to_string(steps) + ") exceed reference length (" + std::to_string(traj.size()) + ")");
  }
  if (std::abs(traj.dt() - cfg.dt) > 1e-12) { throw std::invalid_argument("controller dt differs from reference dt"); }
  if (!noise_std.allFinite() || (noise_std.array() < 0.0).any()) {
    throw std::invalid_argument("noise standard deviations must be finite and >= 0");
  }
}

double quantile(std::vector<double> values, double q)
{
  if (values.empty()) { return 0.0; }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

SimSummary summarize(const std::vector<SimRecord> & records, const InputBounds & bounds)
{
  SimSummary s;
  if (records.empty()) { return s; }
  const std::size_t n = records.size();
  const auto steady_count =
    std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kSteadyStateFraction * static_cast<double>(n))));
  const std::size_t from = n - steady_count;

  std::vector<double> times;
  times.reserve(n);
  for (const SimRecord & r : records) {
    s.max_ep = std::max(s.max_ep, r.ep);
    s.max_eR = std::max(s.max_eR, r.eR);
    if (r.u.mu == bounds.lower.mu || r.u.mu == bounds.upper.mu) { ++s.saturated_mu; }
    if (r.u.omega == bounds.lower.omega || r.u.omega == bounds.upper.omega) { ++s.saturated_omega; }
    if (!bounds.contains(r.u)) { ++s.bound_violations; }
    times.push_back(r.solve_time);
  }
  s.mean_ep = mean_of(records, 0, &SimRecord::ep);
  s.mean_eR = mean_of(records, 0, &SimRecord::eR);
  s.steady_ep = mean_of(records, from, &SimRecord::ep);
  s.steady_eR = mean_of(records, from, &SimRecord::eR);
  s.solve_time_median = quantile(times, 0.5);
  s.solve_time_p95 = quantile(times, 0.95);
  s.solve_time_max = *std::max_element(times.begin(), times.end());
  return s;
}

SimResult run(const SimScenario & s)
{
  s.validate();
  SimResult result;
  result.records.reserve(s.steps);

  GmpcController controller(s.cfg);
  std::mt19937_64 rng = keyed_engine(s.seed, s.stream, kNoiseTag);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool noisy = (s.noise_std.array() > 0.0).any();

  Pose x = s.init_pose;
  for (std::size_t k = 0; k < s.steps; ++k) {
    StepResult step;
    try {
      step = controller.step(x, s.traj, k);
    } catch (const std::exception & e) {
      result.failed = true;
      result.failure = "step " + std::to_string(k) + ": " + e.what();
      break;
    }

    const TrackingErrors err = tracking_errors(x, s.traj[k].xd);
    SimRecord rec;
    rec.t = s.traj[k].t;
    rec.pose = x;
    rec.u = step.u;
    rec.ep = err.position;
    rec.eR = err.rotation;
    rec.psi = step.diag.psi;
    rec.qp_iters = step.diag.qp_iterations;
    rec.kkt = step.diag.kkt_residual;
    rec.solve_time = s.record_timing ? step.diag.solve_time : 0.0;
    result.records.push_back(rec);

    Twist applied = input_to_twist(step.u);
    if (noisy) {
      applied.vx += s.noise_std(0) * normal(rng);
      applied.vy += s.noise_std(1) * normal(rng);
      applied.w += s.noise_std(2) * normal(rng);
    }
    x = integrate_twist(x, applied, s.cfg.dt, s.plant_mode);
  }
  result.summary = summarize(result.records, s.cfg.bounds);
  return result;
}

Pose sample_initial_pose(const InitSampler & sampler, std::uint64_t seed, std::uint64_t run)
{
  std::mt19937_64 rng = keyed_engine(seed, run, kInitTag);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ux = unit(rng), uy = unit(rng), uh = unit(rng);
  return Pose(sampler.pos_lo.x() + ux * (sampler.pos_hi.x() - sampler.pos_lo.x()),
              sampler.pos_lo.y() + uy * (sampler.pos_hi.y() - sampler.pos_lo.y()),
              sampler.heading_lo + uh * (sampler.heading_hi - sampler.heading_lo));
}

std::vector<EnvelopeRow> envelope(const std::vector<SimResult> & runs)
{
  std::vector<const SimResult *> ok;
  for (const SimResult & r : runs) {
    if (!r.failed) { ok.push_back(&r); }
  }
  if (ok.empty()) { return {}; }
  std::size_t steps = ok.front()->records.size();
  for (const SimResult * r : ok) { steps = std::min(steps, r->records.size()); }

  std::vector<EnvelopeRow> rows(steps);
  std::vector<double> ep(ok.size()), eR(ok.size());
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < ok.size(); ++i) {
      ep[i] = ok[i]->records[k].ep;
      eR[i] = ok[i]->records[k].eR;
    }
    EnvelopeRow & row = rows[k];
    row.t = ok.front()->records[k].t;
    row.ep_min = *std::min_element(ep.begin(), ep.end());
    row.ep_max = *std::max_element(ep.begin(), ep.end());
    row.ep_median = quantile(ep, 0.5);
    row.eR_min = *std::min_element(eR.begin(), eR.end());
    row.eR_max = *std::max_element(eR.begin(), eR.end());
    row.eR_median = quantile(eR, 0.5);
  }
  return rows;
}

MonteCarloResult monte_carlo(
  const SimScenario & base, std::size_t runs, const InitSampler & sampler, std::uint64_t seed, unsigned threads)
{
  if (runs < 1) { throw std::invalid_argument("monte carlo needs at least one run"); }
  base.validate();

  MonteCarloResult mc;
  mc.runs.resize(runs);
  mc.initial_poses.resize(runs);
  for (std::size_t i = 0; i < runs; ++i) { mc.initial_poses[i] = sample_initial_pose(sampler, seed, i); }

  auto run_one = [&](std::size_t i) {
    SimScenario s = base;
    s.init_pose = mc.initial_poses[i];
    s.seed = seed;
    s.stream = i;
    mc.runs[i] = run(s);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(runs)));
  if (workers == 1) {
    for (std::size_t i = 0; i < runs; ++i) { run_one(i); }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < runs; i = next++) { run_one(i); }
      });
    }
    for (std::thread & t : pool) { t.join(); }
  }

  for (const SimResult & r : mc.runs) { mc.failures += r.failed ? 1 : 0; }
  mc.envelope = envelope(mc.runs);
  return mc;
}

void write_result_csv(std::ostream & os, const std::vector<SimRecord> & records)
{
  using csv::format_double;
  os << kResultCsvHeader << '\n';
  for (const SimRecord & r : records) {
    os << format_double(r.t) << ',' << format_double(r.pose.x()) << ',' << format_double(r.pose.y()) << ','
       << format_double(r.pose.theta()) << ',' << format_double(r.u.mu) << ',' << format_double(r.u.omega) << ','
       << format_double(r.ep) << ',' << format_double(r.eR) << ',' << format_double(r.psi.vx) << ','
       << format_double(r.psi.vy) << ',' << format_double(r.psi.w) << ',' << r.qp_iters << ','
       << format_double(r.kkt) << ',' << format_double(r.solve_time) << '\n';
  }
}

std::vector<SimRecord> read_result_csv(std::istream & is)
{
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line) || line != kResultCsvHeader) {
    throw CsvError(1, std::string("expected header '") + kResultCsvHeader + "'");
  }
  std::vector<SimRecord> out;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) { continue; }
    const auto fields = csv::split(line);
    if (fields.size() != 14) { throw CsvError(lineno, "expected 14 fields, got " + std::to_string(fields.size())); }
    double v[14];
    for (std::size_t i = 0; i < 14; ++i) {
      if (!csv::parse_double(fields[i], v[i])) {
        throw CsvError(lineno, "malformed number in column " + std::to_string(i + 1));
      }
    }
    SimRecord r;
    r.t = v[0];
    r.pose = Pose(v[1], v[2], v[3]);
    r.u = {v[4], v[5]};
    r.ep = v[6];
    r.eR = v[7];
    r.psi = {v[8], v[9], v[10]};
    if (v[11] != std::floor(v[11]) || v[11] < 0) { throw CsvError(lineno, "qp_iters must be a non-negative integer"); }
    r.qp_iters = static_cast<int>(v[11]);
    r.kkt = v[12];
    r.solve_time = v[13];
    out.push_back(r);
  }
  return out;
}

void write_envelope_csv(std::ostream & os, const std::vector<EnvelopeRow> & rows)
{
  using csv::format_double;
  os << kEnvelopeCsvHeader << '\n';
  for (const EnvelopeRow & r : rows) {
    os << format_double(r.t) << ',' << format_double(r.ep_min) << ',' << format_double(r.ep_median) << ','
       << format_double(r.ep_max) << ',' << format_double(r.eR_min) << ',' << format_double(r.eR_median) << ','
       << format_double(r.eR_max) << '\n';
  }
}

void export_csv(const SimResult & r, const std::filesystem::path & path)
{
  std::ofstream os(path);
  if (!os) { throw std::runtime_error("cannot open " + path.string() + " for writing"); }
  write_result_csv(os, r.records);
  if (!os) { throw std::runtime_error("write failed: " + path.string()); }
}

std::vector<SimRecord> load_result_csv(const std::filesystem::path & path)
{
  std::ifstream is(path);
  if (!is) { throw std::runtime_error("cannot open " + path.string()); }
  return read_result_csv(is);
}

}  // namespace gmpc

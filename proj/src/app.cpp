#include "gmpc/app.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gmpc/csv.hpp"
#include "gmpc/svg.hpp"

namespace gmpc {

namespace fs = std::filesystem;

namespace {

const char * scheme_name(Linearization s) { return s == Linearization::proposed ? "proposed" : "naive"; }

void write_text(const fs::path & path, const std::string & text)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) { throw std::runtime_error("cannot open " + path.string() + " for writing"); }
  os << text;
  if (!os) { throw std::runtime_error("write failed: " + path.string()); }
}

void prepare_dir(const fs::path & dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) { throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message()); }
}

void kv(std::ostringstream & os, const char * key, double v) { os << key << " = " << csv::format_double(v) << '\n'; }

/// Exit code for exceptions escaping a command body.
template<typename Fn>
int guarded(std::ostream & err, Fn && fn)
{
  try {
    return fn();
  } catch (const ConfigError & e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

ExperimentConfig resolve_config(const fs::path & config_path, const CliOverrides & ov)
{
  ExperimentConfig cfg = load_experiment(config_path);
  if (ov.platform) { apply_platform(cfg, *ov.platform); }
  if (ov.scheme) {
    if (*ov.scheme == "proposed") {
      cfg.controller.scheme = Linearization::proposed;
    } else if (*ov.scheme == "naive") {
      cfg.controller.scheme = Linearization::naive;
    } else {
      throw ConfigError("--scheme", "expected 'proposed' or 'naive'");
    }
  }
  if (ov.seed) { cfg.seed = *ov.seed; }
  if (ov.out) { cfg.output_dir = *ov.out; }
  return cfg;
}

std::string format_summary(const ExperimentConfig & cfg, const SimResult & r)
{
  std::ostringstream os;
  os << "scenario = " << cfg.name << '\n';
  os << "scheme = " << scheme_name(cfg.controller.scheme) << '\n';
  os << "platform = " << cfg.platform << '\n';
  os << "horizon = " << cfg.controller.horizon << '\n';
  os << "steps = " << r.records.size() << '\n';
  os << "status = " << (r.failed ? "failed: " + r.failure : std::string("ok")) << '\n';
  const SimSummary & s = r.summary;
  kv(os, "max_ep", s.max_ep);
  kv(os, "mean_ep", s.mean_ep);
  kv(os, "steady_ep", s.steady_ep);
  kv(os, "max_eR", s.max_eR);
  kv(os, "mean_eR", s.mean_eR);
  kv(os, "steady_eR", s.steady_eR);
  os << "saturated_mu = " << s.saturated_mu << '\n';
  os << "saturated_omega = " << s.saturated_omega << '\n';
  os << "bound_violations = " << s.bound_violations << '\n';
  return os.str();
}

int cmd_run(const fs::path & config_path, const CliOverrides & ov, std::ostream & out, std::ostream & err)
{
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve_config(config_path, ov);
    const SimScenario scenario = build_scenario(cfg);
    const SimResult r = run(scenario);

    prepare_dir(cfg.output_dir);
    export_csv(r, cfg.output_dir / "result.csv");
    save_csv(scenario.traj, cfg.output_dir / "reference.csv");
    const std::string summary = format_summary(cfg, r);
    write_text(cfg.output_dir / "summary.txt", summary);
    if (cfg.plot) { write_text(cfg.output_dir / "plot.svg", render_plot_svg(r.records, scenario.traj)); }

    out << summary;
    if (r.failed) {
      err << "run failed: " << r.failure << '\n';
      return static_cast<int>(kExitRuntime);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_montecarlo(const fs::path & config_path, const CliOverrides & ov, std::ostream & out, std::ostream & err)
{
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve_config(config_path, ov);
    if (cfg.mc_runs < 1) { throw ConfigError("monte_carlo.runs", "must be at least 1"); }
    const SimScenario base = build_scenario(cfg);
    const MonteCarloResult mc = monte_carlo(base, cfg.mc_runs, cfg.sampler, cfg.seed, cfg.threads);

    prepare_dir(cfg.output_dir / "runs");
    for (std::size_t i = 0; i < mc.runs.size(); ++i) {
      std::ostringstream name;
      name << "run_" << std::setw(3) << std::setfill('0') << i << ".csv";
      export_csv(mc.runs[i], cfg.output_dir / "runs" / name.str());
    }
    {
      std::ostringstream os;
      write_envelope_csv(os, mc.envelope);
      write_text(cfg.output_dir / "envelope.csv", os.str());
    }
    {
      std::ostringstream os;
      os << "run,x,y,theta\n";
      for (std::size_t i = 0; i < mc.initial_poses.size(); ++i) {
        const Pose & p = mc.initial_poses[i];
        os << i << ',' << csv::format_double(p.x()) << ',' << csv::format_double(p.y()) << ','
           << csv::format_double(p.theta()) << '\n';
      }
      write_text(cfg.output_dir / "initial_poses.csv", os.str());
    }

    std::ostringstream os;
    os << "scenario = " << cfg.name << '\n';
    os << "scheme = " << scheme_name(cfg.controller.scheme) << '\n';
    os << "runs = " << mc.runs.size() << '\n';
    os << "failures = " << mc.failures << '\n';
    std::size_t violations = 0;
    for (const SimResult & r : mc.runs) { violations += r.summary.bound_violations; }
    os << "bound_violations = " << violations << '\n';
    if (!mc.envelope.empty()) {
      kv(os, "final_ep_median", mc.envelope.back().ep_median);
      kv(os, "final_ep_max", mc.envelope.back().ep_max);
      kv(os, "final_eR_median", mc.envelope.back().eR_median);
      kv(os, "final_eR_max", mc.envelope.back().eR_max);
    }
    write_text(cfg.output_dir / "summary.txt", os.str());
    out << os.str();
    for (std::size_t i = 0; i < mc.runs.size(); ++i) {
      if (mc.runs[i].failed) { err << "run " << i << " failed: " << mc.runs[i].failure << '\n'; }
    }
    return static_cast<int>(mc.failures == 0 ? kExitOk : kExitRuntime);
  });
}

BenchReport bench_controller(const SimScenario & scenario, std::size_t min_steps)
{
  SimScenario s = scenario;
  s.record_timing = true;
  std::vector<double> times;
  times.reserve(min_steps);
  while (times.size() < min_steps) {
    const SimResult r = run(s);
    if (r.failed) { throw std::runtime_error("benchmark run failed: " + r.failure); }
    for (const SimRecord & rec : r.records) { times.push_back(rec.solve_time); }
  }
  BenchReport rep;
  rep.steps = times.size();
  rep.horizon = s.cfg.horizon;
  rep.median = quantile(times, 0.5);
  rep.p95 = quantile(times, 0.95);
  rep.max = *std::max_element(times.begin(), times.end());
  return rep;
}

int cmd_bench(const fs::path & config_path, const CliOverrides & ov, std::ostream & out, std::ostream & err)
{
  return guarded(err, [&] {
    const ExperimentConfig cfg = resolve_config(config_path, ov);
    const BenchReport rep = bench_controller(build_scenario(cfg), cfg.bench_steps);

    std::ostringstream os;
    os << "scenario = " << cfg.name << '\n';
    os << "horizon = " << rep.horizon << '\n';
    os << "steps = " << rep.steps << '\n';
    os << std::scientific << std::setprecision(3);
    os << "median_s = " << rep.median << '\n';
    os << "p95_s = " << rep.p95 << '\n';
    os << "max_s = " << rep.max << '\n';
    os << std::fixed << std::setprecision(3);
    os << "p95_over_median = " << rep.p95_over_median() << '\n';

    prepare_dir(cfg.output_dir);
    write_text(cfg.output_dir / "bench.txt", os.str());
    out << os.str();
    return static_cast<int>(kExitOk);
  });
}

}  // namespace gmpc

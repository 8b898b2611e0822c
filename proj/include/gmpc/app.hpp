#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "gmpc/experiment.hpp"

namespace gmpc {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitConfig = 2 };

/// Command-line overrides applied on top of the experiment file.
struct CliOverrides
{
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scheme;
  std::optional<std::string> platform;
};

/// Loads the file and applies overrides. Throws ConfigError.
ExperimentConfig resolve_config(const std::filesystem::path & config_path, const CliOverrides & ov);

/// result.csv, reference.csv, summary.txt and optionally plot.svg.
int cmd_run(const std::filesystem::path & config_path, const CliOverrides & ov, std::ostream & out, std::ostream & err);

/// Per-run CSVs under runs/, envelope.csv, initial_poses.csv, summary.txt.
int cmd_montecarlo(const std::filesystem::path & config_path, const CliOverrides & ov, std::ostream & out,
                   std::ostream & err);

/// Controller step timing over at least bench.steps steps; writes bench.txt.
int cmd_bench(const std::filesystem::path & config_path, const CliOverrides & ov, std::ostream & out,
              std::ostream & err);

/// Randomized invariant checks; one PASS/FAIL line each.
int cmd_selftest(std::ostream & out);

struct BenchReport
{
  std::size_t steps = 0;
  std::size_t horizon = 0;
  double median = 0.0, p95 = 0.0, max = 0.0;
  double p95_over_median() const { return median > 0.0 ? p95 / median : 0.0; }
};

/// Runs the scenario (restarting as needed) until `min_steps` timed steps exist.
BenchReport bench_controller(const SimScenario & scenario, std::size_t min_steps);

/// key = value lines; floats with 17 significant digits.
std::string format_summary(const ExperimentConfig & cfg, const SimResult & r);

}  // namespace gmpc

#include <iostream>

#include <CLI11.hpp>

#include "gmpc/app.hpp"

int main(int argc, char ** argv)
{
  CLI::App app{"Geometric MPC for wheeled mobile robots: closed-loop experiments and benchmarks"};
  app.require_subcommand(1);

  std::string config;
  gmpc::CliOverrides ov;
  std::string out_dir, scheme, platform;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App * sub) {
    sub->add_option("--config", config, "experiment file (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--scheme", scheme, "linearization scheme")->check(CLI::IsMember({"proposed", "naive"}));
    sub->add_option("--platform", platform, "platform preset")->check(CLI::IsMember({"turtlebot3", "scoutmini"}));
  };

  CLI::App * run = app.add_subcommand("run", "closed-loop simulation of one scenario");
  CLI::App * mc = app.add_subcommand("montecarlo", "seeded runs from random initial poses");
  CLI::App * bench = app.add_subcommand("bench", "controller solve-time benchmark");
  app.add_subcommand("selftest", "randomized invariant checks");
  add_common(run);
  add_common(mc);
  add_common(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gmpc::kExitConfig;
  }

  CLI::App * active = app.get_subcommands().front();
  if (active->get_name() == "selftest") { return gmpc::cmd_selftest(std::cout); }

  if (active->count("--out")) { ov.out = out_dir; }
  if (active->count("--seed")) { ov.seed = seed; }
  if (active->count("--scheme")) { ov.scheme = scheme; }
  if (active->count("--platform")) { ov.platform = platform; }

  if (active == run) { return gmpc::cmd_run(config, ov, std::cout, std::cerr); }
  if (active == mc) { return gmpc::cmd_montecarlo(config, ov, std::cout, std::cerr); }
  return gmpc::cmd_bench(config, ov, std::cout, std::cerr);
}

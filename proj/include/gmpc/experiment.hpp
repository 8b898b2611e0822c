#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "gmpc/simkit.hpp"

namespace gmpc {

/// Schema violation in an experiment file; `path` is the offending field, e.g. "bounds.mu".
class ConfigError : public std::runtime_error
{
public:
  ConfigError(std::string path, const std::string & what);
  const std::string & path() const { return path_; }

private:
  std::string path_;
};

struct Platform
{
  std::string name;
  InputBounds bounds;
  double rate_hz = 50.0;
};

/// Named platform limits; nullopt for unknown names.
std::optional<Platform> platform_preset(const std::string & name);

struct ConstantTwistSpec
{
  ControlInput ud{0.2, 0.196};
};

struct ExperimentConfig
{
  std::string name = "experiment";
  std::variant<ConstantTwistSpec, Lissajous> trajectory = ConstantTwistSpec{};
  double duration = 30.0;
  IntegrationMode integration = IntegrationMode::group;
  std::string platform = "turtlebot3";
  GmpcConfig controller;
  std::optional<Pose> initial_pose;   ///< default: reference start
  std::optional<std::size_t> steps;   ///< default: every reference sample
  Vec3 noise_std = Vec3::Zero();
  PlantMode plant = PlantMode::group_exact;
  std::uint64_t seed = 1;
  std::size_t mc_runs = 50;
  InitSampler sampler;
  unsigned threads = 1;
  std::size_t bench_steps = 1000;
  bool plot = true;
  std::filesystem::path output_dir = "out";
};

/// Parses the JSON experiment text. Throws ConfigError with the field path.
ExperimentConfig parse_experiment(const std::string & text);

/// Reads and parses; unreadable files are reported as ConfigError on "<file>".
ExperimentConfig load_experiment(const std::filesystem::path & path);

/// Applies a named platform preset (bounds and control rate). Throws ConfigError.
void apply_platform(ExperimentConfig & cfg, const std::string & name);

/// Reference trajectory described by the config.
ReferenceTrajectory build_reference(const ExperimentConfig & cfg);

/// Single-run scenario; the initial pose defaults to the reference start.
SimScenario build_scenario(const ExperimentConfig & cfg);

}  // namespace gmpc

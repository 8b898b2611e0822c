#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmpc/model.hpp"

namespace gmpc {

struct TrajectorySample
{
  double t = 0.0;
  Pose xd;
  Twist zd;
  ControlInput ud;

  bool operator==(const TrajectorySample &) const = default;
};

/// How reference poses are integrated from u_d.
enum class IntegrationMode { group, euler };

/**
 * @brief Reference (X_d, zeta_d, u_d) on the uniform grid t_k = k * dt.
 *
 * Immutable once built. Indexing past the end holds the final sample.
 */
class ReferenceTrajectory
{
public:
  ReferenceTrajectory() = default;

  /// Checks the grid and zd = input_to_twist(ud); throws std::invalid_argument.
  ReferenceTrajectory(double dt, std::vector<TrajectorySample> samples);

  double dt() const { return dt_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const std::vector<TrajectorySample> & samples() const { return samples_; }

  const TrajectorySample & operator[](std::size_t k) const { return samples_[k]; }

  /// Sample k, or the last sample when k runs past the end.
  const TrajectorySample & hold(std::size_t k) const;

  double duration() const { return samples_.empty() ? 0.0 : samples_.back().t; }

  bool operator==(const ReferenceTrajectory &) const = default;

private:
  double dt_ = 0.0;
  std::vector<TrajectorySample> samples_;
};

/// Integrates u_d from start; returns steps + 1 samples.
ReferenceTrajectory integrate_reference(
  const Pose & start, const std::vector<ControlInput> & ud, double dt,
  IntegrationMode mode = IntegrationMode::group);

/// Constant input from the identity pose: a circle of radius mu/|omega|, or a line.
ReferenceTrajectory gen_constant_twist(
  const ControlInput & ud, double dt, std::size_t steps, IntegrationMode mode = IntegrationMode::group);

/// x(t) = ax sin(fx t + phase), y(t) = ay sin(fy t).
struct Lissajous
{
  double ax = 1.0;
  double ay = 0.5;
  double fx = 0.3;
  double fy = 0.6;
  double phase = 0.0;
};

/// Path speed below which the flat inputs are considered singular (m/s).
inline constexpr double kMinFlatSpeed = 1e-4;

/// Throws if the path speed drops below kMinFlatSpeed; names the offending t_k.
class DegeneratePathError : public std::invalid_argument
{
public:
  DegeneratePathError(double t, double speed);
  double time() const { return t_; }

private:
  double t_;
};

/// Flat inputs at time t: mu = |p_dot|, omega = (x' y'' - y' x'') / |p_dot|^2.
ControlInput flat_inputs(const Lissajous & path, double t);

/**
 * @brief Reference from a Lissajous path via unicycle flatness.
 *
 * Inputs come from the analytic derivatives; poses are re-integrated from u_d
 * starting at the analytic initial pose, so the result is dynamically
 * consistent rather than sampled from the curve.
 */
ReferenceTrajectory gen_flat(
  const Lissajous & path, double dt, std::size_t steps, IntegrationMode mode = IntegrationMode::group);

struct BoundViolation
{
  std::size_t index;
  ControlInput ud;
};

std::vector<BoundViolation> find_bound_violations(const ReferenceTrajectory & traj, const InputBounds & bounds);

/// Thrown by the CSV reader; carries the 1-based line number.
class CsvError : public std::runtime_error
{
public:
  CsvError(std::size_t line, const std::string & what);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

inline constexpr const char * kTrajectoryCsvHeader = "t,x,y,theta,vx,vy,w,mu,omega";

void write_trajectory_csv(std::ostream & os, const ReferenceTrajectory & traj);
ReferenceTrajectory read_trajectory_csv(std::istream & is);

void save_csv(const ReferenceTrajectory & traj, const std::filesystem::path & path);
ReferenceTrajectory load_csv(const std::filesystem::path & path);

}  // namespace gmpc

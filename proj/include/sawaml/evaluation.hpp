#pragma once

#include "sawaml/geometry.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sawaml {

inline constexpr int kMetricsSchemaVersion = 1;

enum class AlignMode { Initial, Full };

/// Moves `est` rigidly so that its first pose coincides with gt's first pose.
/// Throws PreconditionError when the step grids differ.
Trajectory align_initial(const Trajectory& est, const Trajectory& gt);

/// Least-squares rigid fit of all positions (diagnostic only).
Trajectory align_full(const Trajectory& est, const Trajectory& gt);

Trajectory align(const Trajectory& est, const Trajectory& gt, AlignMode mode);

/// Root mean square of the per-step translation error.
double ate_rmse(const Trajectory& est, const Trajectory& gt);

double trajectory_length(const Trajectory& traj);

struct RobotAte {
  int id = 0;
  double length_m = 0.0;
  double ate_vio = 0.0;
  double ate_corrected = 0.0;
  double ate_global = 0.0;
};

struct AteReport {
  int schema_version = kMetricsSchemaVersion;
  std::string scenario;
  std::uint64_t seed = 0;
  AlignMode alignment = AlignMode::Initial;
  std::vector<RobotAte> per_robot;
  RobotAte avg;

  std::string to_json() const;
  std::string to_table() const;
};

/// Ids in the report are 1-based.
AteReport make_report(std::span<const Trajectory> gt, std::span<const Trajectory> vio,
                      std::span<const Trajectory> corrected, std::span<const Trajectory> global,
                      AlignMode mode = AlignMode::Initial);

}  // namespace sawaml

#pragma once

#include "sawaml/alignment.hpp"
#include "sawaml/correction.hpp"
#include "sawaml/geometry.hpp"
#include "sawaml/pipeline.hpp"
#include "sawaml/range_pipeline.hpp"
#include "sawaml/weights.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sawaml::io {

// Trajectory rows: step,t,x,y,z,qw,qx,qy,qz (quaternion scalar first, qw >= 0).
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
/// dt is recovered from the t column (default 0.1 for single-row files).
Trajectory read_trajectory(const std::filesystem::path& path);

// Raw ranges: step,i,j,distance with 1-based robot ids.
void write_ranges(const std::filesystem::path& path, std::span<const RawRange> ranges);
std::vector<RawRange> read_ranges(const std::filesystem::path& path);

// Odometry context: step,vx,vy,vz,yaw_rate,pitch_rate,depth (body frame).
void write_odometry(const std::filesystem::path& path, std::span<const OdomSample> samples);
/// Local poses are taken from `vio`, which must share the step grid.
std::vector<OdomSample> read_odometry(const std::filesystem::path& path, const Trajectory& vio,
                                      int robot);

void write_anchors(const std::filesystem::path& path, std::span<const AnchorNodeSet> anchors,
                   double dt);
void write_weights(const std::filesystem::path& path, std::span<const WeightSet> weights);
void write_scales(const std::filesystem::path& path, std::span<const ScaleRecord> scales);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// `<prefix>_<id>.csv` for id = 1, 2, ... until the first missing file.
std::vector<Trajectory> read_numbered_trajectories(const std::filesystem::path& dir,
                                                   const std::string& prefix);

std::filesystem::path numbered(const std::filesystem::path& dir, const std::string& prefix, int id);

/// Writes every trajectory and pipeline artifact of a run into `dir`.
void write_run(const std::filesystem::path& dir, const SimulatedRun& run);

}  // namespace sawaml::io

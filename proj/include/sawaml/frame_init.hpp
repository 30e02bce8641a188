#pragma once

#include "sawaml/geometry.hpp"
#include "sawaml/range_pipeline.hpp"
#include "sawaml/structure.hpp"

#include <span>
#include <vector>

namespace sawaml {

/// Range observations after the structure epoch together with the motion of
/// every robot since that epoch, expressed in the world frame.
struct FrameInitSample {
  RangeSet ranges;
  std::vector<Vec3> displacements;
};

struct FrameInitOptions {
  /// Huber threshold on range residuals (m).
  double huber = 0.3;
  /// Angular resolution of the coarse search (rad).
  double grid_step = 0.2;
  int refine_iterations = 30;
};

struct FrameInitResult {
  Mat3 rotation = Mat3::Identity();
  bool mirrored = false;
  double cost = 0.0;
  /// World-frame offsets of every robot from robot 0 at the structure epoch.
  std::vector<Vec3> offsets;
};

/// Robust range cost of orienting `structure` by `rotation`:
/// sum of huber(|R (s_j - s_i) + d_j - d_i| - r_ij) over samples and pairs.
double frame_init_cost(const Mat3& rotation, std::span<const Vec3> structure,
                       std::span<const FrameInitSample> samples, double huber);

/// Finds the rotation and mirror candidate that best explain how ranges
/// evolve under the observed motion. Coarse search over SO(3) for both
/// candidates, then Gauss-Newton refinement of the best one. Throws
/// Error("initialization failed") if no sample carries a valid range.
FrameInitResult resolve_initial_frame(const StructureEstimate& structure,
                                      std::span<const FrameInitSample> samples,
                                      const FrameInitOptions& options = {});

}  // namespace sawaml

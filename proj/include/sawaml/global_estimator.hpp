#pragma once

#include "sawaml/geometry.hpp"
#include "sawaml/range_pipeline.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sawaml {

enum class InitialPoseMode { Known, Unknown };

struct GlobalOptions {
  double lambda_range = 1.0;
  double lambda_vio = 1.0;
  /// IRLS regularizer for the absolute range residual.
  double delta = 1e-6;
  int max_iterations = 20;
  double step_tolerance = 1e-10;
};

/// Per-robot world poses. The world frame is robot 0's local VIO frame.
struct WorldState {
  std::vector<RigidPose> initial;
  std::vector<RigidPose> current;
  std::vector<Trajectory> trajectories;

  int size() const { return static_cast<int>(current.size()); }
  std::vector<Vec3> positions() const;
};

/// Range term: sum over ordered pairs of |r_ij^2 - |x_i - x_j|^2|, masked
/// pairs skipped.
double global_range_cost(std::span<const RigidPose> poses, const RangeSet& ranges);

/// VIO term of one robot: |T0^-1 * T - L|_F^2 on the 3x4 blocks.
double vio_residual_sq(const RigidPose& pose, const RigidPose& initial, const RigidPose& vio);

/// lambda_range * range term + lambda_vio * sum of VIO terms.
double global_cost(std::span<const RigidPose> poses, const RangeSet& ranges,
                   std::span<const RigidPose> vio, std::span<const RigidPose> initials,
                   const GlobalOptions& options = {});

struct StepResult {
  std::vector<RigidPose> poses;
  double cost = 0.0;
  double warm_cost = 0.0;
  int iterations = 0;
};

/// Damped Gauss-Newton over all N poses (rotation vector + translation per
/// robot) with the range term handled by IRLS. The result never costs more
/// than the warm start. Throws NumericalError("optimizer diverged") when the
/// cost goes non-finite.
StepResult optimize_step(std::span<const RigidPose> warm_start, const RangeSet& ranges,
                         std::span<const RigidPose> vio, std::span<const RigidPose> initials,
                         const GlobalOptions& options = {});

/// Initial world poses.
///
/// Known: ground-truth initial poses re-expressed in robot 0's frame.
/// Unknown: positions from an accepted structure (robot 0 at the origin,
/// already rotated into the world frame by the caller when needed) with
/// identity rotations. Throws Error("initialization failed") when no
/// structure is available in unknown mode.
std::vector<RigidPose> initialize_world(InitialPoseMode mode,
                                        const std::optional<std::vector<Vec3>>& structure,
                                        std::span<const RigidPose> gt_initial = {});

}  // namespace sawaml

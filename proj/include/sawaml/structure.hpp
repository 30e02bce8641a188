#pragma once

#include "sawaml/error.hpp"
#include "sawaml/geometry.hpp"
#include "sawaml/range_pipeline.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sawaml {

/// Raised when the robots are too close to collinear to fix frame A.
class DegenerateConfiguration : public NumericalError {
 public:
  DegenerateConfiguration() : NumericalError("degenerate configuration") {}
};

/// Relative robot positions in frame A: robot 0 at the origin, robot 1 on
/// +x, robot 2 in the xy-plane with y >= 0.
struct StructureEstimate {
  Timestamp stamp;
  std::vector<Vec3> positions;
  /// `positions` reflected through the xy-plane.
  std::vector<Vec3> mirror_positions;
  double residual = 0.0;
  /// Third singular value of the centered positions fell below the threshold.
  bool planar = false;
  int iterations = 0;
};

struct StructureOptions {
  /// IRLS regularizer in 1 / (|r^2 - d^2| + delta).
  double delta = 1e-6;
  int max_iterations = 100;
  double tolerance = 1e-10;
  /// Allowed excess in r_ij <= r_ik + r_kj before rejecting the set.
  double triangle_slack = 1.0;
  /// Singular-value threshold (m) for the collinear / planar gates.
  double degeneracy_threshold = 0.05;
};

/// Sum over ordered pairs i != j of |r_ij^2 - |x_i - x_j|^2|. Each unordered
/// pair therefore contributes twice.
double structure_residual(std::span<const Vec3> positions, const RangeSet& ranges);

/// Solves for frame-A positions from a fully valid range set of N >= 4 robots.
///
/// Starts from `init` when given (normally the previous accepted structure),
/// otherwise from classical MDS. Throws PreconditionError for incomplete or
/// triangle-violating ranges, DegenerateConfiguration for near-collinear
/// solutions and NumericalError when the optimizer fails.
StructureEstimate estimate_structure(const RangeSet& ranges,
                                     const std::optional<std::vector<Vec3>>& init = std::nullopt,
                                     const StructureOptions& options = {});

/// Strict threshold test: residual < zeta.
bool accept_structure(const StructureEstimate& estimate, double zeta);

/// 0.1 * N * (N - 1) m^2.
double default_zeta(int robots);

/// Moves a point set into frame A. Robots 0, 1 and 2 define the frame.
std::vector<Vec3> gauge_normalize(std::span<const Vec3> positions);

/// z-negated copy.
std::vector<Vec3> mirror_structure(std::span<const Vec3> positions);

/// Classical multidimensional scaling into 3D (not gauge-normalized).
std::vector<Vec3> classical_mds(const RangeSet& ranges);

/// Singular values (descending) of the centered N x 3 position matrix.
Vec3 centered_singular_values(std::span<const Vec3> positions);

}  // namespace sawaml

#pragma once

#include "sawaml/geometry.hpp"
#include "sawaml/structure.hpp"

#include <array>
#include <span>
#include <vector>

namespace sawaml {

struct Alignment {
  RigidPose transform;
  /// Sum of w_i * |world_i - T * structure_i| (unsquared norm).
  double cost = 0.0;
};

/// Weighted rigid registration of `structure` onto `world` (no scale).
///
/// Minimizes the squared weighted error in closed form (weighted Kabsch), so
/// det(R) = +1 always; reflections are left to select_mirror. Throws
/// PreconditionError on mismatched sizes, negative or all-zero weights and
/// fewer than three weighted points, and NumericalError("alignment degenerate")
/// when the weighted points are collinear.
Alignment weighted_align(std::span<const Vec3> world, std::span<const Vec3> structure,
                         std::span<const double> weights);

/// sum_i w_i * |world_i - T * structure_i|
double alignment_cost(std::span<const Vec3> world, std::span<const Vec3> structure,
                      std::span<const double> weights, const RigidPose& transform);

/// World-frame anchor nodes from one accepted structure.
struct AnchorNodeSet {
  int epoch = 0;
  Timestamp stamp;
  RigidPose world_from_structure;
  std::vector<Vec3> positions;
  bool mirrored = false;
  /// Unsquared weighted cost of {original, mirrored} candidates.
  std::array<double, 2> costs{0.0, 0.0};
};

/// Aligns both mirror candidates and keeps the cheaper one. Ties, and planar
/// structures whose twins coincide, resolve to the original candidate.
AnchorNodeSet select_mirror(const StructureEstimate& candidates, std::span<const Vec3> world,
                            std::span<const double> weights, int epoch = 0);

}  // namespace sawaml

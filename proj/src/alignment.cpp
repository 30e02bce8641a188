#include "sawaml/alignment.hpp"

#include "sawaml/error.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace sawaml {

double alignment_cost(std::span<const Vec3> world, std::span<const Vec3> structure,
                      std::span<const double> weights, const RigidPose& transform) {
  double cost = 0.0;
  for (std::size_t i = 0; i < world.size(); ++i) {
    cost += weights[i] * (world[i] - transform.apply(structure[i])).norm();
  }
  return cost;
}

Alignment weighted_align(std::span<const Vec3> world, std::span<const Vec3> structure,
                         std::span<const double> weights) {
  const std::size_t n = world.size();
  if (structure.size() != n || weights.size() != n) {
    throw PreconditionError("alignment inputs differ in length");
  }
  double total = 0.0;
  int weighted_points = 0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("alignment weights must be non-negative");
    total += w;
    weighted_points += w > 0.0 ? 1 : 0;
  }
  if (!(total > 0.0)) throw PreconditionError("alignment weights sum to zero");
  if (weighted_points < 3) throw PreconditionError("alignment needs at least three weighted points");

  Vec3 world_mean = Vec3::Zero();
  Vec3 struct_mean = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    world_mean += weights[i] * world[i];
    struct_mean += weights[i] * structure[i];
  }
  world_mean /= total;
  struct_mean /= total;

  Mat3 cross = Mat3::Zero();
  Mat3 spread = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 s = structure[i] - struct_mean;
    cross += weights[i] * s * (world[i] - world_mean).transpose();
    spread += weights[i] * s * s.transpose();
  }

  // Collinear weighted structure leaves the rotation about the line free.
  Eigen::JacobiSVD<Mat3> spread_svd(spread);
  const Vec3 sv = spread_svd.singularValues();
  if (sv[1] <= 1e-12 * std::max(sv[0], 1.0)) throw NumericalError("alignment degenerate");

  Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  if ((v * u.transpose()).determinant() < 0.0) d(2, 2) = -1.0;

  Alignment out;
  out.transform.rotation = v * d * u.transpose();
  out.transform.translation = world_mean - out.transform.rotation * struct_mean;
  out.cost = alignment_cost(world, structure, weights, out.transform);
  return out;
}

AnchorNodeSet select_mirror(const StructureEstimate& candidates, std::span<const Vec3> world,
                            std::span<const double> weights, int epoch) {
  if (candidates.mirror_positions.size() != candidates.positions.size()) {
    throw PreconditionError("structure is missing its mirror candidate");
  }
  const Alignment original = weighted_align(world, candidates.positions, weights);
  const Alignment mirrored = weighted_align(world, candidates.mirror_positions, weights);

  AnchorNodeSet anchors;
  anchors.epoch = epoch;
  anchors.stamp = candidates.stamp;
  anchors.costs = {original.cost, mirrored.cost};
  anchors.mirrored = !candidates.planar && mirrored.cost < original.cost;

  const auto& chosen = anchors.mirrored ? mirrored : original;
  const auto& source = anchors.mirrored ? candidates.mirror_positions : candidates.positions;
  anchors.world_from_structure = chosen.transform;
  anchors.positions.reserve(source.size());
  for (const auto& p : source) anchors.positions.push_back(chosen.transform.apply(p));
  return anchors;
}

}  // namespace sawaml

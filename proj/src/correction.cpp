#include "sawaml/correction.hpp"

#include "sawaml/error.hpp"

#include <algorithm>
#include <cmath>

namespace sawaml {

Vec3 scale_error(const Vec3& prev_anchor, const Vec3& cur_anchor, const Vec3& prev_estimate,
                 const Vec3& cur_estimate, const CorrectionOptions& options) {
  Vec3 factors = Vec3::Ones();
  for (int a = 0; a < 3; ++a) {
    const double estimated = std::abs(cur_estimate[a] - prev_estimate[a]);
    if (estimated < options.epsilon_motion) continue;
    const double anchored = std::abs(cur_anchor[a] - prev_anchor[a]);
    factors[a] = std::clamp(anchored / estimated, options.scale_min, options.scale_max);
  }
  return factors;
}

ScaleState update_scale_state(const ScaleState& state, const Vec3& factors, int epoch,
                              const CorrectionOptions& options) {
  ScaleState next;
  next.factors = state.factors.cwiseProduct(factors).cwiseMax(options.scale_min).cwiseMin(
      options.scale_max);
  next.last_epoch = epoch;
  return next;
}

CorrectionBatch correct_epoch(std::span<const Vec3> nodes, const Vec3& anchor, int robot,
                              int epoch) {
  if (nodes.size() < 2) throw PreconditionError("empty epoch");
  const int m = static_cast<int>(nodes.size()) - 1;

  CorrectionBatch batch;
  batch.robot = robot;
  batch.epoch = epoch;
  batch.before.assign(nodes.begin(), nodes.end());
  batch.discrepancy = anchor - nodes.back();
  batch.after.resize(nodes.size());
  for (int n = 0; n <= m; ++n) {
    batch.after[n] = nodes[n] + (static_cast<double>(n) / m) * batch.discrepancy;
  }
  batch.after.back() = anchor;
  return batch;
}

Vec3 apply_scale_feedback(const Vec3& delta, const ScaleState& state) {
  return delta.cwiseProduct(state.factors);
}

Vec3 apply_scale_feedback_world(const Vec3& body_delta, const Mat3& world_rotation,
                                const ScaleState& state) {
  const Vec3 world = world_rotation * body_delta;
  return world_rotation.transpose() * world.cwiseProduct(state.factors);
}

}  // namespace sawaml

#pragma once

#include "sawaml/geometry.hpp"

#include <span>
#include <vector>

namespace sawaml {

struct CorrectionOptions {
  double scale_min = 0.5;
  double scale_max = 2.0;
  /// Per-axis displacement (m) below which a scale observation is discarded.
  double epsilon_motion = 0.05;
};

/// Accumulated per-axis VIO scale factor of one robot.
struct ScaleState {
  Vec3 factors = Vec3::Ones();
  int last_epoch = 0;
};

/// Per-axis |anchor displacement| / |estimate displacement| between two
/// anchor epochs, clamped to [scale_min, scale_max]. Axes whose estimated
/// displacement is below epsilon_motion report 1.
Vec3 scale_error(const Vec3& prev_anchor, const Vec3& cur_anchor, const Vec3& prev_estimate,
                 const Vec3& cur_estimate, const CorrectionOptions& options = {});

/// Hadamard update e_S <- e_S (.) factors, clamped.
ScaleState update_scale_state(const ScaleState& state, const Vec3& factors, int epoch,
                              const CorrectionOptions& options = {});

struct CorrectionBatch {
  int robot = 0;
  int epoch = 0;
  std::vector<Vec3> before;
  std::vector<Vec3> after;
  /// anchor - before.back()
  Vec3 discrepancy = Vec3::Zero();
};

/// Spreads the endpoint discrepancy linearly over the m_k + 1 nodes of an
/// epoch: after[n] = before[n] + (n / m_k) * e_D. after.back() is set to the
/// anchor itself so the endpoint matches bit for bit.
CorrectionBatch correct_epoch(std::span<const Vec3> nodes, const Vec3& anchor, int robot = 0,
                              int epoch = 0);

/// Scales a VIO translation increment component-wise.
Vec3 apply_scale_feedback(const Vec3& delta, const ScaleState& state);

/// Scales a body-frame increment along world axes: rotate into the world
/// with `world_rotation`, scale, rotate back.
Vec3 apply_scale_feedback_world(const Vec3& body_delta, const Mat3& world_rotation,
                                const ScaleState& state);

}  // namespace sawaml

#include "sawaml/weights.hpp"

#include "sawaml/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sawaml {

void CameraFov::validate() const {
  if (!(vertical > 0.0 && vertical <= horizontal && horizontal < std::numbers::pi)) {
    throw ConfigError("camera field of view must satisfy 0 < vertical <= horizontal < pi");
  }
}

int epoch_length(Timestamp current, Timestamp previous) {
  if (current.step <= previous.step) throw PreconditionError("epoch end must follow its start");
  return static_cast<int>(current.step - previous.step);
}

double velocity_weight(std::span<const OdomSample> samples, double dt) {
  if (samples.empty()) throw PreconditionError("velocity weight needs at least one sample");
  double sum = 0.0;
  for (const auto& s : samples) {
    const double l = s.feature_depth;
    if (!(l > 0.0)) throw PreconditionError("feature depth must be positive");
    const double forward = std::max(l - std::max(s.velocity.x(), 0.0) * dt, 0.0) / l;
    const double lateral = std::max(l - std::abs(s.velocity.y()) * dt, 0.0) / l;
    const double vertical = std::max(l - std::abs(s.velocity.z()) * dt, 0.0) / l;
    sum += forward * forward + lateral + vertical;
  }
  return sum / static_cast<double>(samples.size());
}

double rotation_weight(std::span<const OdomSample> samples, const CameraFov& fov, double dt) {
  if (samples.empty()) throw PreconditionError("rotation weight needs at least one sample");
  double sum = 0.0;
  for (const auto& s : samples) {
    const double h = std::max(fov.horizontal - std::abs(s.yaw_rate) * dt, 0.0) / fov.horizontal;
    const double v = std::max(fov.vertical - std::abs(s.pitch_rate) * dt, 0.0) / fov.vertical;
    sum += h * v;
  }
  return sum / static_cast<double>(samples.size());
}

double consistency_weight(std::span<const std::vector<Vec3>> world,
                          const Eigen::MatrixXd& structure_distances, int robot, double epsilon) {
  if (world.empty()) throw PreconditionError("consistency weight needs at least one step");
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
  const int n = static_cast<int>(structure_distances.rows());
  double sum = 0.0;
  for (const auto& step : world) {
    if (static_cast<int>(step.size()) != n) {
      throw PreconditionError("world positions do not match the structure size");
    }
    for (int j = 0; j < n; ++j) {
      if (j == robot) continue;
      const double expected = structure_distances(robot, j);
      const double actual = (step[robot] - step[j]).norm();
      sum += expected / (std::abs(actual - expected) + epsilon);
    }
  }
  return sum / static_cast<double>(world.size());
}

std::vector<double> WeightSet::totals() const {
  std::vector<double> out;
  out.reserve(robots.size());
  for (const auto& r : robots) out.push_back(r.total);
  return out;
}

WeightSet normalize_and_total(std::span<const RawWeights> raw, int epoch, Timestamp stamp) {
  double max_v = 0.0;
  double max_a = 0.0;
  double max_r = 0.0;
  for (const auto& w : raw) {
    max_v = std::max(max_v, w.velocity);
    max_a = std::max(max_a, w.rotation);
    max_r = std::max(max_r, w.consistency);
  }
  auto normalized = [](double value, double max) { return max > 0.0 ? value / max : 0.0; };

  WeightSet set;
  set.epoch = epoch;
  set.stamp = stamp;
  for (const auto& w : raw) {
    RobotWeights r;
    r.raw = w;
    r.velocity_hat = normalized(w.velocity, max_v);
    r.rotation_hat = normalized(w.rotation, max_a);
    r.consistency_hat = normalized(w.consistency, max_r);
    r.total = r.rotation_hat + r.velocity_hat + r.consistency_hat;
    set.robots.push_back(r);
  }
  return set;
}

Eigen::MatrixXd pairwise_distances(std::span<const Vec3> positions) {
  const int n = static_cast<int>(positions.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (positions[i] - positions[j]).norm();
  return d;
}

}  // namespace sawaml

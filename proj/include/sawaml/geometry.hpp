#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <vector>

namespace sawaml {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform in SE(3), stored as a rotation matrix plus translation.
///
/// Rotations stay as matrices so the Frobenius residuals of the global
/// optimizer act directly on the stored entries. Quaternions only show up
/// at the CSV boundary.
struct RigidPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  RigidPose() = default;
  RigidPose(const Mat3& r, const Vec3& t) : rotation(r), translation(t) {}

  static RigidPose identity() { return {}; }
  static RigidPose from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }
  static RigidPose from_rotation(const Mat3& r) { return {r, Vec3::Zero()}; }
  /// Rotation of `angle` radians about the (normalized) `axis`.
  static RigidPose from_axis_angle(const Vec3& axis, double angle);
  static RigidPose from_quaternion(const Eigen::Quaterniond& q, const Vec3& t);

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Eigen::Quaterniond quaternion() const;

  /// True when the rotation is orthonormal with det +1 within `tol` per entry.
  bool is_valid(double tol = 1e-9) const;
};

RigidPose compose(const RigidPose& a, const RigidPose& b);
RigidPose inverse(const RigidPose& p);

/// Frobenius norm of the difference of the 3x4 [R|t] blocks.
double frobenius_pose_distance(const RigidPose& a, const RigidPose& b);

/// Projects the rotation back onto SO(3) (SVD polar factor).
RigidPose renormalize(const RigidPose& p);

/// Rotation exp map for a rotation vector (axis * angle).
Mat3 so3_exp(const Vec3& omega);

/// Skew-symmetric cross-product matrix.
Mat3 skew(const Vec3& v);

/// Integer step on the Δt grid. Seconds are always derived, never compared.
struct Timestamp {
  std::int64_t step = 0;

  double seconds(double dt) const { return static_cast<double>(step) * dt; }
  auto operator<=>(const Timestamp&) const = default;
};

struct TrajectoryPoint {
  Timestamp stamp;
  RigidPose pose;
};

/// Poses ordered by strictly increasing step.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(double dt) : dt_(dt) {}

  /// Appends a pose. Throws PreconditionError unless `step` is after the last one.
  void push_back(std::int64_t step, const RigidPose& pose);

  double dt() const { return dt_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const TrajectoryPoint& operator[](std::size_t i) const { return points_[i]; }
  RigidPose& pose_at(std::size_t i) { return points_[i].pose; }
  const TrajectoryPoint& front() const { return points_.front(); }
  const TrajectoryPoint& back() const { return points_.back(); }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  std::vector<Vec3> positions() const;

 private:
  double dt_ = 0.1;
  std::vector<TrajectoryPoint> points_;
};

}  // namespace sawaml

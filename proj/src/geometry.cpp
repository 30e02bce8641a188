#include "sawaml/geometry.hpp"

#include "sawaml/error.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace sawaml {

RigidPose RigidPose::from_axis_angle(const Vec3& axis, double angle) {
  return from_rotation(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

RigidPose RigidPose::from_quaternion(const Eigen::Quaterniond& q, const Vec3& t) {
  return {q.normalized().toRotationMatrix(), t};
}

Eigen::Quaterniond RigidPose::quaternion() const {
  Eigen::Quaterniond q(rotation);
  q.normalize();
  // Scalar-first with qw >= 0 so the CSV form is unique.
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return q;
}

bool RigidPose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const Mat3 gram = rotation.transpose() * rotation;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

RigidPose compose(const RigidPose& a, const RigidPose& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

RigidPose inverse(const RigidPose& p) {
  const Mat3 rt = p.rotation.transpose();
  return {rt, -(rt * p.translation)};
}

double frobenius_pose_distance(const RigidPose& a, const RigidPose& b) {
  const double rot = (a.rotation - b.rotation).squaredNorm();
  const double trans = (a.translation - b.translation).squaredNorm();
  return std::sqrt(rot + trans);
}

RigidPose renormalize(const RigidPose& p) {
  Eigen::JacobiSVD<Mat3> svd(p.rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return {svd.matrixU() * d * svd.matrixV().transpose(), p.translation};
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Mat3 so3_exp(const Vec3& omega) {
  const double angle = omega.norm();
  if (angle < 1e-12) return Mat3::Identity() + skew(omega);
  return Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
}

void Trajectory::push_back(std::int64_t step, const RigidPose& pose) {
  if (!points_.empty() && step <= points_.back().stamp.step) {
    throw PreconditionError("trajectory steps must be strictly increasing (got " +
                            std::to_string(step) + " after " +
                            std::to_string(points_.back().stamp.step) + ")");
  }
  points_.push_back({Timestamp{step}, pose});
}

std::vector<Vec3> Trajectory::positions() const {
  std::vector<Vec3> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.pose.translation);
  return out;
}

}  // namespace sawaml

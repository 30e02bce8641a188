#include "sawaml/global_estimator.hpp"

#include "sawaml/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace sawaml {
namespace {

void check_sizes(std::span<const RigidPose> poses, const RangeSet& ranges,
                 std::span<const RigidPose> vio, std::span<const RigidPose> initials) {
  if (static_cast<int>(poses.size()) != ranges.size() || vio.size() != poses.size() ||
      initials.size() != poses.size()) {
    throw PreconditionError("global estimator inputs differ in robot count");
  }
}

std::vector<RigidPose> apply_step(std::span<const RigidPose> poses, const Eigen::VectorXd& step) {
  std::vector<RigidPose> out(poses.begin(), poses.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Vec3 dtheta = step.segment<3>(6 * i);
    const Vec3 dp = step.segment<3>(6 * i + 3);
    out[i].rotation = out[i].rotation * so3_exp(dtheta);
    out[i].translation += dp;
    out[i] = renormalize(out[i]);
  }
  return out;
}

}  // namespace

std::vector<Vec3> WorldState::positions() const {
  std::vector<Vec3> out;
  out.reserve(current.size());
  for (const auto& p : current) out.push_back(p.translation);
  return out;
}

double global_range_cost(std::span<const RigidPose> poses, const RangeSet& ranges) {
  const int n = ranges.size();
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!ranges.valid(i, j)) continue;
      const double r = ranges.range(i, j);
      sum += std::abs(r * r - (poses[i].translation - poses[j].translation).squaredNorm());
    }
  return sum;
}

double vio_residual_sq(const RigidPose& pose, const RigidPose& initial, const RigidPose& vio) {
  const RigidPose relative = compose(inverse(initial), pose);
  const double d = frobenius_pose_distance(relative, vio);
  return d * d;
}

double global_cost(std::span<const RigidPose> poses, const RangeSet& ranges,
                   std::span<const RigidPose> vio, std::span<const RigidPose> initials,
                   const GlobalOptions& options) {
  check_sizes(poses, ranges, vio, initials);
  double vio_sum = 0.0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    vio_sum += vio_residual_sq(poses[i], initials[i], vio[i]);
  }
  return options.lambda_range * global_range_cost(poses, ranges) + options.lambda_vio * vio_sum;
}

StepResult optimize_step(std::span<const RigidPose> warm_start, const RangeSet& ranges,
                         std::span<const RigidPose> vio, std::span<const RigidPose> initials,
                         const GlobalOptions& options) {
  check_sizes(warm_start, ranges, vio, initials);
  const int n = ranges.size();
  const int params = 6 * n;

  StepResult result;
  result.poses.assign(warm_start.begin(), warm_start.end());
  result.warm_cost = global_cost(warm_start, ranges, vio, initials, options);
  if (!std::isfinite(result.warm_cost)) throw NumericalError("optimizer diverged");
  double cost = result.warm_cost;
  double damping = 1e-6;

  for (int it = 0; it < options.max_iterations; ++it) {
    const auto& poses = result.poses;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(params, params);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(params);

    for (int i = 0; i < n; ++i) {
      const Mat3 r0t = initials[i].rotation.transpose();
      // Rotation block: R0^T R - L_R, perturbed as R * exp(dtheta).
      const Mat3 base = r0t * poses[i].rotation;
      const Mat3 rot_err = base - vio[i].rotation;
      Eigen::Matrix<double, 9, 3> jr;
      for (int k = 0; k < 3; ++k) {
        const Mat3 d = base * skew(Vec3::Unit(k));
        jr.col(k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(d.data());
      }
      const Eigen::Map<const Eigen::Matrix<double, 9, 1>> er(rot_err.data());
      h.block<3, 3>(6 * i, 6 * i) += options.lambda_vio * jr.transpose() * jr;
      g.segment<3>(6 * i) += options.lambda_vio * jr.transpose() * er;

      // Translation block: R0^T (p - p0) - L_p.
      const Vec3 et = r0t * (poses[i].translation - initials[i].translation) - vio[i].translation;
      h.block<3, 3>(6 * i + 3, 6 * i + 3) += options.lambda_vio * r0t.transpose() * r0t;
      g.segment<3>(6 * i + 3) += options.lambda_vio * r0t.transpose() * et;
    }

    // IRLS on |e|: weight lambda / (|e| + delta) reproduces the gradient of
    // the doubled absolute term (2 * lambda * |e|) at the current point.
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (!ranges.valid(i, j)) continue;
        const Vec3 diff = poses[i].translation - poses[j].translation;
        const double r = ranges.range(i, j);
        const double e = r * r - diff.squaredNorm();
        const double w = options.lambda_range / (std::abs(e) + options.delta);
        const Vec3 ji = -2.0 * diff;
        const int a = 6 * i + 3;
        const int b = 6 * j + 3;
        h.block<3, 3>(a, a) += w * ji * ji.transpose();
        h.block<3, 3>(b, b) += w * ji * ji.transpose();
        h.block<3, 3>(a, b) -= w * ji * ji.transpose();
        h.block<3, 3>(b, a) -= w * ji * ji.transpose();
        g.segment<3>(a) += w * e * ji;
        g.segment<3>(b) -= w * e * ji;
      }
    }

    const double floor = 1e-9 * std::max(h.diagonal().maxCoeff(), 1.0);
    const Eigen::VectorXd diag = h.diagonal().cwiseMax(floor);
    bool accepted = false;
    Eigen::VectorXd step;
    std::vector<RigidPose> candidate;
    double new_cost = cost;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd lhs = h;
      lhs.diagonal() += damping * diag;
      step = lhs.ldlt().solve(-g);
      if (!step.allFinite()) {
        damping *= 10.0;
        continue;
      }
      candidate = apply_step(poses, step);
      new_cost = global_cost(candidate, ranges, vio, initials, options);
      if (!std::isfinite(new_cost)) throw NumericalError("optimizer diverged");
      if (new_cost < cost) {
        accepted = true;
        break;
      }
      damping *= 10.0;
    }
    result.iterations = it + 1;
    if (!accepted) break;
    result.poses = std::move(candidate);
    cost = new_cost;
    damping = std::max(damping / 10.0, 1e-12);
    if (step.norm() < options.step_tolerance) break;
  }
  result.cost = cost;
  return result;
}

std::vector<RigidPose> initialize_world(InitialPoseMode mode,
                                        const std::optional<std::vector<Vec3>>& structure,
                                        std::span<const RigidPose> gt_initial) {
  if (mode == InitialPoseMode::Known) {
    if (gt_initial.empty()) throw PreconditionError("known-initial mode needs ground-truth poses");
    const RigidPose world_from_gt = inverse(gt_initial.front());
    std::vector<RigidPose> out;
    out.reserve(gt_initial.size());
    for (const auto& p : gt_initial) out.push_back(renormalize(compose(world_from_gt, p)));
    out.front() = RigidPose::identity();
    return out;
  }
  if (!structure || structure->empty()) throw Error("initialization failed");
  std::vector<RigidPose> out;
  out.reserve(structure->size());
  const Vec3 origin = structure->front();
  for (const auto& p : *structure) out.push_back(RigidPose::from_translation(p - origin));
  return out;
}

}  // namespace sawaml

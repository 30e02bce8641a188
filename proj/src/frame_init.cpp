#include "sawaml/frame_init.hpp"

#include "sawaml/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>

namespace sawaml {
namespace {

double huber(double e, double k) {
  const double a = std::abs(e);
  return a <= k ? 0.5 * e * e : k * (a - 0.5 * k);
}

Mat3 euler_zyx(double yaw, double pitch, double roll) {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

Mat3 refine(Mat3 rotation, std::span<const Vec3> s, std::span<const FrameInitSample> samples,
            const FrameInitOptions& options) {
  const int n = static_cast<int>(s.size());
  double cost = frame_init_cost(rotation, s, samples, options.huber);
  double damping = 1e-3;
  for (int it = 0; it < options.refine_iterations; ++it) {
    Mat3 h = Mat3::Zero();
    Vec3 g = Vec3::Zero();
    for (const auto& sample : samples) {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          if (!sample.ranges.valid(i, j)) continue;
          const Vec3 sij = s[j] - s[i];
          const Vec3 v = rotation * sij + sample.displacements[j] - sample.displacements[i];
          const double norm = v.norm();
          if (norm < 1e-9) continue;
          const double e = norm - sample.ranges.range(i, j);
          const double w = std::abs(e) <= options.huber ? 1.0 : options.huber / std::abs(e);
          const Eigen::RowVector3d jac = (v / norm).transpose() * (-rotation * skew(sij));
          h += w * jac.transpose() * jac;
          g += w * e * jac.transpose();
        }
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Mat3 lhs = h;
      lhs.diagonal() += damping * (h.diagonal().array() + 1e-9).matrix();
      const Vec3 step = lhs.ldlt().solve(-g);
      const Mat3 candidate = renormalize(RigidPose(rotation * so3_exp(step), Vec3::Zero())).rotation;
      const double c = frame_init_cost(candidate, s, samples, options.huber);
      if (c < cost) {
        rotation = candidate;
        accepted = step.norm() > 1e-12;
        cost = c;
        damping = std::max(damping * 0.1, 1e-12);
        break;
      }
      damping *= 10.0;
    }
    if (!accepted) break;
  }
  return rotation;
}

}  // namespace

double frame_init_cost(const Mat3& rotation, std::span<const Vec3> structure,
                       std::span<const FrameInitSample> samples, double k) {
  const int n = static_cast<int>(structure.size());
  std::vector<Vec3> rotated(structure.size());
  for (int i = 0; i < n; ++i) rotated[i] = rotation * structure[i];
  double sum = 0.0;
  for (const auto& sample : samples) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (!sample.ranges.valid(i, j)) continue;
        const Vec3 v = rotated[j] - rotated[i] + sample.displacements[j] - sample.displacements[i];
        sum += huber(v.norm() - sample.ranges.range(i, j), k);
      }
  }
  return sum;
}

FrameInitResult resolve_initial_frame(const StructureEstimate& structure,
                                      std::span<const FrameInitSample> samples,
                                      const FrameInitOptions& options) {
  const std::size_t n = structure.positions.size();
  bool any = false;
  for (const auto& sample : samples) {
    if (sample.displacements.size() != n || sample.ranges.size() != static_cast<int>(n)) {
      throw PreconditionError("frame initialization inputs differ in robot count");
    }
    any = any || sample.ranges.valid_pairs() > 0;
  }
  if (!any) throw Error("initialization failed");

  // Thin the samples for the exhaustive search.
  std::vector<FrameInitSample> coarse;
  const std::size_t stride = std::max<std::size_t>(1, samples.size() / 60);
  for (std::size_t k = 0; k < samples.size(); k += stride) coarse.push_back(samples[k]);

  const std::vector<Vec3>* candidates[2] = {&structure.positions, &structure.mirror_positions};
  const int count = structure.planar ? 1 : 2;
  const double step = options.grid_step;
  const double pi = std::numbers::pi;

  FrameInitResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int c = 0; c < count; ++c) {
    const auto& s = *candidates[c];
    Mat3 best_rotation = Mat3::Identity();
    double best_cost = std::numeric_limits<double>::infinity();
    for (double yaw = -pi; yaw < pi; yaw += step)
      for (double pitch = -pi / 2; pitch <= pi / 2 + 1e-12; pitch += step)
        for (double roll = -pi; roll < pi; roll += step) {
          const Mat3 r = euler_zyx(yaw, pitch, roll);
          const double cost = frame_init_cost(r, s, coarse, options.huber);
          if (cost < best_cost) {
            best_cost = cost;
            best_rotation = r;
          }
        }
    const Mat3 refined = refine(best_rotation, s, samples, options);
    const double cost = frame_init_cost(refined, s, samples, options.huber);
    if (cost < best.cost) {
      best.cost = cost;
      best.rotation = refined;
      best.mirrored = c == 1;
    }
  }

  const auto& chosen = best.mirrored ? structure.mirror_positions : structure.positions;
  for (const auto& p : chosen) best.offsets.push_back(best.rotation * (p - chosen.front()));
  return best;
}

}  // namespace sawaml

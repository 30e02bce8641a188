#include "sawaml/structure.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace sawaml {
namespace {

void require_complete(const RangeSet& ranges) {
  if (!ranges.fully_valid()) throw PreconditionError("incomplete range set");
}

// Free coordinates of the gauge-fixed parameterization: robot 1 keeps x,
// robot 2 keeps x and y, everything from robot 3 on is free.
int param_index(int robot, int axis) {
  if (robot == 0) return -1;
  if (robot == 1) return axis == 0 ? 0 : -1;
  if (robot == 2) return axis == 2 ? -1 : 1 + axis;
  return 3 + 3 * (robot - 3) + axis;
}

Eigen::VectorXd pack(std::span<const Vec3> positions) {
  const int n = static_cast<int>(positions.size());
  Eigen::VectorXd theta(3 * n - 6);
  for (int r = 1; r < n; ++r)
    for (int a = 0; a < 3; ++a)
      if (const int k = param_index(r, a); k >= 0) theta[k] = positions[r][a];
  return theta;
}

std::vector<Vec3> unpack(const Eigen::VectorXd& theta, int n) {
  std::vector<Vec3> p(n, Vec3::Zero());
  for (int r = 1; r < n; ++r)
    for (int a = 0; a < 3; ++a)
      if (const int k = param_index(r, a); k >= 0) p[r][a] = theta[k];
  return p;
}

void check_triangles(const RangeSet& ranges, double slack) {
  const int n = ranges.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (ranges.range(i, j) > ranges.range(i, k) + ranges.range(k, j) + slack) {
          throw PreconditionError("range set violates the triangle inequality");
        }
      }
}

}  // namespace

double structure_residual(std::span<const Vec3> positions, const RangeSet& ranges) {
  const int n = static_cast<int>(positions.size());
  if (ranges.size() != n) throw PreconditionError("range set size does not match positions");
  require_complete(ranges);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double r = ranges.range(i, j);
      sum += std::abs(r * r - (positions[i] - positions[j]).squaredNorm());
    }
  return sum;
}

bool accept_structure(const StructureEstimate& estimate, double zeta) {
  return estimate.residual < zeta;
}

double default_zeta(int robots) { return 0.1 * robots * (robots - 1); }

std::vector<Vec3> mirror_structure(std::span<const Vec3> positions) {
  std::vector<Vec3> out(positions.begin(), positions.end());
  for (auto& p : out) p.z() = -p.z();
  return out;
}

std::vector<Vec3> gauge_normalize(std::span<const Vec3> positions) {
  const int n = static_cast<int>(positions.size());
  if (n < 3) throw PreconditionError("gauge normalization needs at least three robots");
  const Vec3 origin = positions[0];
  const Vec3 v = positions[1] - origin;
  if (v.norm() < 1e-12) throw DegenerateConfiguration();
  const Vec3 e1 = v.normalized();
  const Vec3 w = positions[2] - origin;
  Vec3 u = w - w.dot(e1) * e1;
  if (u.norm() < 1e-12) {
    // Robot 2 on the x-axis: any perpendicular completes the frame.
    u = e1.unitOrthogonal();
  }
  const Vec3 e2 = u.normalized();
  const Vec3 e3 = e1.cross(e2);
  Mat3 rot;
  rot.row(0) = e1.transpose();
  rot.row(1) = e2.transpose();
  rot.row(2) = e3.transpose();

  std::vector<Vec3> out(n);
  for (int i = 0; i < n; ++i) out[i] = rot * (positions[i] - origin);
  out[0].setZero();
  out[1].y() = 0.0;
  out[1].z() = 0.0;
  out[2].z() = 0.0;
  return out;
}

std::vector<Vec3> classical_mds(const RangeSet& ranges) {
  require_complete(ranges);
  const int n = ranges.size();
  const Eigen::MatrixXd d2 = ranges.matrix().array().square().matrix();
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd gram = -0.5 * centering * d2 * centering;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  std::vector<Vec3> out(n, Vec3::Zero());
  for (int axis = 0; axis < 3 && axis < n; ++axis) {
    const int col = n - 1 - axis;
    const double scale = std::sqrt(std::max(eig.eigenvalues()[col], 0.0));
    for (int i = 0; i < n; ++i) out[i][axis] = eig.eigenvectors()(i, col) * scale;
  }
  return out;
}

Vec3 centered_singular_values(std::span<const Vec3> positions) {
  const int n = static_cast<int>(positions.size());
  Eigen::MatrixXd m(n, 3);
  Vec3 mean = Vec3::Zero();
  for (const auto& p : positions) mean += p;
  mean /= n;
  for (int i = 0; i < n; ++i) m.row(i) = (positions[i] - mean).transpose();
  Vec3 sv = Vec3::Zero();
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  for (int k = 0; k < s.size() && k < 3; ++k) sv[k] = s[k];
  return sv;
}

StructureEstimate estimate_structure(const RangeSet& ranges,
                                     const std::optional<std::vector<Vec3>>& init,
                                     const StructureOptions& options) {
  const int n = ranges.size();
  if (n < 4) throw PreconditionError("structure estimation needs at least four robots");
  require_complete(ranges);
  check_triangles(ranges, options.triangle_slack);

  std::vector<Vec3> start;
  if (init && static_cast<int>(init->size()) == n) {
    start = gauge_normalize(*init);
  } else {
    start = gauge_normalize(classical_mds(ranges));
  }

  const int params = 3 * n - 6;
  Eigen::VectorXd theta = pack(start);
  double cost = structure_residual(unpack(theta, n), ranges);
  const double initial_cost = cost;
  double damping = 1e-6;
  int iterations = 0;

  for (; iterations < options.max_iterations; ++iterations) {
    const auto p = unpack(theta, n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(params, params);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(params);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Vec3 diff = p[i] - p[j];
        const double r = ranges.range(i, j);
        const double e = r * r - diff.squaredNorm();
        // Ordered-pair double count folded into the weight.
        const double w = 2.0 / (std::abs(e) + options.delta);
        Eigen::VectorXd jac = Eigen::VectorXd::Zero(params);
        for (int a = 0; a < 3; ++a) {
          if (const int k = param_index(i, a); k >= 0) jac[k] += -2.0 * diff[a];
          if (const int k = param_index(j, a); k >= 0) jac[k] += 2.0 * diff[a];
        }
        h.noalias() += w * jac * jac.transpose();
        g.noalias() += w * e * jac;
      }
    }

    const Eigen::VectorXd diag = h.diagonal().cwiseMax(1e-9 * std::max(h.diagonal().maxCoeff(), 1.0));
    bool accepted = false;
    double new_cost = cost;
    Eigen::VectorXd candidate;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd lhs = h;
      lhs.diagonal() += damping * diag;
      candidate = theta + lhs.ldlt().solve(-g);
      if (!candidate.allFinite()) {
        damping *= 10.0;
        continue;
      }
      new_cost = structure_residual(unpack(candidate, n), ranges);
      if (new_cost < cost) {
        accepted = true;
        break;
      }
      damping *= 10.0;
    }
    if (!accepted) break;
    theta = candidate;
    damping = std::max(damping / 10.0, 1e-12);
    const double change = cost - new_cost;
    cost = new_cost;
    if (change < options.tolerance) {
      ++iterations;
      break;
    }
  }

  if (!std::isfinite(cost) || cost > 10.0 * initial_cost + 1e-12) {
    throw NumericalError("structure optimization failed");
  }

  StructureEstimate est;
  est.stamp = ranges.stamp();
  est.positions = gauge_normalize(unpack(theta, n));
  est.mirror_positions = mirror_structure(est.positions);
  est.residual = structure_residual(est.positions, ranges);
  est.iterations = iterations;

  const Vec3 sv = centered_singular_values(est.positions);
  if (sv[1] < options.degeneracy_threshold) throw DegenerateConfiguration();
  est.planar = sv[2] < options.degeneracy_threshold;
  return est;
}

}  // namespace sawaml

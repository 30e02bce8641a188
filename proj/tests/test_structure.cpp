#include "doctest.h"

#include "sawaml/error.hpp"
#include "sawaml/structure.hpp"
#include "support/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

using namespace sawaml;

namespace {

const std::vector<Vec3> kTetra{{0, 0, 0}, {3, 0, 0}, {0, 4, 0}, {0, 0, 5}};

// Stress cost written out directly over a 4x4 distance table.
double oracle_residual(const std::array<Vec3, 4>& x, const double r[4][4]) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) s += std::abs(r[i][j] * r[i][j] - (x[i] - x[j]).squaredNorm());
  return s;
}

// Coarse-to-fine grid search over the six free frame-A coordinates
// (x2; x3, y3; x4, y4, z4) around `center`.
std::array<Vec3, 4> grid_oracle(const std::vector<Vec3>& center, const double r[4][4]) {
  std::array<double, 6> c{center[1].x(), center[2].x(), center[2].y(),
                          center[3].x(), center[3].y(), center[3].z()};
  double h = 0.1;
  const int k = 3;  // 7 points per axis
  auto build = [](const std::array<double, 6>& v) {
    return std::array<Vec3, 4>{Vec3::Zero(), Vec3(v[0], 0, 0), Vec3(v[1], v[2], 0),
                               Vec3(v[3], v[4], v[5])};
  };
  for (int level = 0; level < 8; ++level) {
    std::array<double, 6> best = c;
    double best_cost = oracle_residual(build(c), r);
    std::array<int, 6> idx{};
    idx.fill(-k);
    for (;;) {
      std::array<double, 6> v;
      for (int d = 0; d < 6; ++d) v[d] = c[d] + idx[d] * h;
      const double cost = oracle_residual(build(v), r);
      if (cost < best_cost) {
        best_cost = cost;
        best = v;
      }
      int d = 0;
      while (d < 6 && ++idx[d] > k) idx[d++] = -k;
      if (d == 6) break;
    }
    // Recentre; shrink only when the optimum is interior.
    bool interior = true;
    for (int d = 0; d < 6; ++d) interior = interior && std::abs(best[d] - c[d]) < k * h - 1e-12;
    c = best;
    if (interior) h /= 3.0;
  }
  return build(c);
}

double max_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, (a[i] - b[i]).norm());
  return e;
}

// Largest error after an unweighted least-squares rigid fit of `a` onto `b`.
double fitted_error(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += a[i] / static_cast<double>(a.size());
    cb += b[i] / static_cast<double>(b.size());
  }
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) h += (a[i] - ca) * (b[i] - cb).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, (r * (a[i] - ca) + cb - b[i]).norm());
  return e;
}

}  // namespace

TEST_CASE("structure residual examples") {
  const RangeSet exact = RangeSet::from_positions(kTetra);
  CHECK(structure_residual(kTetra, exact) == 0.0);

  RangeSet wrong = exact;
  wrong.set(0, 1, 4.0);
  CHECK(structure_residual(kTetra, wrong) == doctest::Approx(14.0).epsilon(1e-14));
  CHECK(structure_residual(mirror_structure(kTetra), wrong) ==
        doctest::Approx(14.0).epsilon(1e-14));

  RangeSet masked = exact;
  masked.invalidate(1, 3);
  CHECK_THROWS_AS(structure_residual(kTetra, masked), PreconditionError);
}

TEST_CASE("exact tetrahedron is recovered in frame A") {
  const RangeSet r = RangeSet::from_positions(kTetra);
  CHECK(r.range(1, 3) == doctest::Approx(std::sqrt(34.0)));
  const auto est = estimate_structure(r);
  CHECK(est.residual < 1e-8);
  CHECK(std::min(max_error(est.positions, kTetra), max_error(est.mirror_positions, kTetra)) < 1e-6);
  CHECK_FALSE(est.planar);
  CHECK(structure_residual(est.positions, r) == est.residual);
}

TEST_CASE("noisy tetrahedron matches the grid-search oracle") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 5; ++trial) {
    RangeSet r(4, {});
    double table[4][4] = {};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double d = (kTetra[i] - kTetra[j]).norm() + noise(rng);
        r.set(i, j, d);
        table[i][j] = table[j][i] = d;
      }
    const auto est = estimate_structure(r);
    const auto oracle = grid_oracle(kTetra, table);
    const std::vector<Vec3> oracle_v(oracle.begin(), oracle.end());

    const bool mirrored = max_error(est.mirror_positions, kTetra) < max_error(est.positions, kTetra);
    const auto& chosen = mirrored ? est.mirror_positions : est.positions;
    // Positions are defined up to a rigid motion, so compare after a fit.
    CHECK(fitted_error(chosen, kTetra) < 0.2);
    CHECK(fitted_error(oracle_v, kTetra) < 0.2);
    // Both sit at the same L1 optimum.
    CHECK(est.residual <= oracle_residual(oracle, table) + 1e-6);
    CHECK(max_error(chosen, oracle_v) < 0.02);
  }
}

TEST_CASE("coplanar robots are flagged planar") {
  const std::vector<Vec3> flat{{0, 0, 0}, {4, 0, 0}, {1, 5, 0}, {6, 3, 0}};
  const auto est = estimate_structure(RangeSet::from_positions(flat));
  CHECK(est.planar);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    CHECK(std::abs(est.positions[i].z()) < 1e-6);
    CHECK((est.positions[i] - est.mirror_positions[i]).norm() < 1e-6);
  }
}

TEST_CASE("acceptance is a strict threshold") {
  StructureEstimate e;
  e.residual = 0.0;
  CHECK(accept_structure(e, 0.5));
  e.residual = 0.5;
  CHECK_FALSE(accept_structure(e, 0.5));
  e.residual = 14.0;
  CHECK_FALSE(accept_structure(e, 0.5));
  CHECK(default_zeta(5) == doctest::Approx(2.0));
}

TEST_CASE("estimator preconditions") {
  RangeSet r = RangeSet::from_positions(kTetra);
  CHECK_THROWS_AS(estimate_structure(RangeSet::from_positions(std::vector<Vec3>(kTetra.begin(), kTetra.end() - 1))),
                  PreconditionError);
  RangeSet masked = r;
  masked.invalidate(0, 2);
  CHECK_THROWS_AS(estimate_structure(masked), PreconditionError);
  RangeSet broken = r;
  broken.set(0, 3, 20.0);  // far beyond r_01 + r_13
  CHECK_THROWS_AS(estimate_structure(broken), PreconditionError);
  const std::vector<Vec3> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  CHECK_THROWS_AS(estimate_structure(RangeSet::from_positions(line)), DegenerateConfiguration);
}

TEST_CASE("gauge invariants hold exactly on random configurations") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + trial % 3;
    const auto p = sawaml::testing::random_configuration(rng, n);
    const RangeSet r = RangeSet::from_positions(p);
    const auto est = estimate_structure(r);
    CHECK(est.positions[0] == Vec3::Zero());
    CHECK(est.positions[1].y() == 0.0);
    CHECK(est.positions[1].z() == 0.0);
    CHECK(est.positions[1].x() >= 0.0);
    CHECK(est.positions[2].z() == 0.0);
    CHECK(est.positions[2].y() >= 0.0);
    for (int i = 0; i < n; ++i) {
      CHECK(est.mirror_positions[i] == Vec3(est.positions[i].x(), est.positions[i].y(), -est.positions[i].z()));
      for (int j = i + 1; j < n; ++j) {
        const double d = (est.positions[i] - est.positions[j]).norm();
        CHECK(std::abs(d - r.range(i, j)) < 1e-6);
        CHECK(d == (est.mirror_positions[i] - est.mirror_positions[j]).norm());
      }
    }
    CHECK(structure_residual(est.positions, r) == est.residual);
  }
}

TEST_CASE("warm start from a nearby structure converges to the same solution") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = sawaml::testing::random_configuration(rng, 5);
    const RangeSet r = RangeSet::from_positions(p);
    const auto cold = estimate_structure(r);
    auto warm_init = cold.positions;
    for (auto& x : warm_init) x += sawaml::testing::random_vec(rng, 0.1);
    const auto warm = estimate_structure(r, warm_init);
    CHECK(max_error(warm.positions, cold.positions) < 1e-5);
  }
}

TEST_CASE("median residual grows with range noise") {
  std::mt19937_64 rng(34);
  std::vector<std::vector<Vec3>> configs;
  for (int k = 0; k < 100; ++k) configs.push_back(sawaml::testing::random_configuration(rng, 5));
  double previous = -1.0;
  for (double sigma : {0.0, 0.05, 0.1, 0.2}) {
    std::mt19937_64 noise_rng(35);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> residuals;
    for (const auto& p : configs) {
      RangeSet r(5, {});
      for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) r.set(i, j, std::max(0.0, (p[i] - p[j]).norm() + sigma * noise(noise_rng)));
      residuals.push_back(estimate_structure(r).residual);
    }
    std::nth_element(residuals.begin(), residuals.begin() + 50, residuals.end());
    CHECK(residuals[50] >= previous);
    previous = residuals[50];
  }
}

TEST_CASE("mds reproduces distances for exact ranges") {
  std::mt19937_64 rng(36);
  const auto p = sawaml::testing::random_configuration(rng, 6);
  const auto q = classical_mds(RangeSet::from_positions(p));
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) CHECK(std::abs((q[i] - q[j]).norm() - (p[i] - p[j]).norm()) < 1e-8);
  const Vec3 sv = centered_singular_values(p);
  CHECK(sv[0] >= sv[1]);
  CHECK(sv[1] >= sv[2]);
}

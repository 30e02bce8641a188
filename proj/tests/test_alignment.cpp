#include "doctest.h"

#include "sawaml/alignment.hpp"
#include "sawaml/error.hpp"
#include "support/generators.hpp"

#include <cmath>
#include <random>

using namespace sawaml;
using namespace sawaml::testing;

namespace {

std::vector<Vec3> transform(const RigidPose& t, const std::vector<Vec3>& p) {
  std::vector<Vec3> out;
  for (const auto& x : p) out.push_back(t.apply(x));
  return out;
}

double pose_gap(const RigidPose& a, const RigidPose& b) {
  return std::max((a.rotation - b.rotation).cwiseAbs().maxCoeff(),
                  (a.translation - b.translation).cwiseAbs().maxCoeff());
}

std::vector<double> random_weights(std::mt19937_64& rng, int n) {
  std::vector<double> w;
  for (int i = 0; i < n; ++i) w.push_back(uniform(rng, 0.2, 3.0));
  return w;
}

StructureEstimate as_structure(const std::vector<Vec3>& p) {
  StructureEstimate s;
  s.positions = p;
  for (const auto& x : p) s.mirror_positions.emplace_back(x.x(), x.y(), -x.z());
  return s;
}

}  // namespace

TEST_CASE("weighted alignment examples") {
  const std::vector<Vec3> s{{0, 0, 0}, {3, 0, 0}, {0, 4, 0}, {0, 0, 5}};
  const std::vector<double> w{1.0, 2.0, 0.5, 1.5};

  const auto same = weighted_align(s, s, w);
  CHECK(pose_gap(same.transform, RigidPose::identity()) < 1e-12);
  CHECK(same.cost < 1e-12);

  const auto shifted = weighted_align(transform(RigidPose::from_translation({1, 2, 3}), s), s, w);
  CHECK(pose_gap(shifted.transform, RigidPose::from_translation({1, 2, 3})) < 1e-12);
  CHECK(shifted.cost < 1e-12);

  const RigidPose t(RigidPose::from_axis_angle(Vec3::UnitZ(), M_PI / 2).rotation, {1, 0, 0});
  const auto turned = weighted_align(transform(t, s), s, w);
  CHECK(pose_gap(turned.transform, t) < 1e-9);
  CHECK(turned.cost < 1e-9);
}

TEST_CASE("weighted alignment preconditions") {
  const std::vector<Vec3> s{{0, 0, 0}, {3, 0, 0}, {0, 4, 0}};
  CHECK_THROWS_AS(weighted_align(s, s, std::vector<double>{1, 1}), PreconditionError);
  CHECK_THROWS_AS(weighted_align(s, s, std::vector<double>{0, 0, 0}), PreconditionError);
  CHECK_THROWS_AS(weighted_align(s, s, std::vector<double>{1, -1, 1}), PreconditionError);
  const std::vector<Vec3> line{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  CHECK_THROWS_AS(weighted_align(line, line, std::vector<double>{1, 1, 1}), NumericalError);
}

TEST_CASE("known transforms round trip") {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 100; ++k) {
    const int n = 4 + k % 3;
    const auto s = random_configuration(rng, n);
    const RigidPose t = random_pose(rng, 50.0);
    const auto w = random_weights(rng, n);
    const auto a = weighted_align(transform(t, s), s, w);
    CHECK(pose_gap(a.transform, t) < 1e-9);
    CHECK(a.transform.is_valid(1e-9));
    CHECK(alignment_cost(transform(t, s), s, w, a.transform) == doctest::Approx(a.cost).epsilon(1e-12));
  }
}

TEST_CASE("alignment is invariant to weight scaling and equivariant in the world frame") {
  std::mt19937_64 rng(52);
  for (int k = 0; k < 100; ++k) {
    const auto s = random_configuration(rng, 5);
    auto world = transform(random_pose(rng), s);
    for (auto& x : world) x += random_vec(rng, 0.5);
    auto w = random_weights(rng, 5);
    const auto a = weighted_align(world, s, w);

    const double c = uniform(rng, 0.01, 100.0);
    auto scaled = w;
    for (auto& x : scaled) x *= c;
    CHECK(pose_gap(weighted_align(world, s, scaled).transform, a.transform) < 1e-10);

    const RigidPose q = random_pose(rng);
    const auto moved = weighted_align(transform(q, world), s, w);
    CHECK(pose_gap(moved.transform, compose(q, a.transform)) < 1e-9);
  }
}

TEST_CASE("mirror selection picks the generating candidate") {
  std::mt19937_64 rng(53);
  int correct = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = 4 + k % 3;
    const auto s = as_structure(random_configuration(rng, n));
    const bool use_mirror = k % 2 == 1;
    const RigidPose t = random_pose(rng, 30.0);
    const auto world = transform(t, use_mirror ? s.mirror_positions : s.positions);
    const auto w = random_weights(rng, n);
    const auto anchor = select_mirror(s, world, w, k);
    correct += anchor.mirrored == use_mirror ? 1 : 0;
    CHECK(anchor.epoch == k);
    CHECK(anchor.costs[anchor.mirrored ? 1 : 0] <= anchor.costs[anchor.mirrored ? 0 : 1]);
    const auto& chosen = anchor.mirrored ? s.mirror_positions : s.positions;
    for (int i = 0; i < n; ++i) {
      CHECK((anchor.positions[i] - anchor.world_from_structure.apply(chosen[i])).norm() < 1e-9);
      CHECK((anchor.positions[i] - world[i]).norm() < 1e-8);
    }
  }
  CHECK(correct == 100);
}

TEST_CASE("planar structures keep the original candidate") {
  const auto s = as_structure({{0, 0, 0}, {4, 0, 0}, {1, 5, 0}, {6, 3, 0}});
  const RigidPose t(RigidPose::from_axis_angle({1, 2, 3}, 0.7).rotation, {2, -1, 4});
  const auto anchor = select_mirror(s, transform(t, s.positions), std::vector<double>(4, 1.0));
  CHECK_FALSE(anchor.mirrored);
  CHECK(anchor.costs[0] < 1e-9);
}

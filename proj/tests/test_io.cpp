#include "doctest.h"

#include "sawaml/error.hpp"
#include "sawaml/io.hpp"
#include "support/generators.hpp"
#include "support/temp_dir.hpp"

#include <fstream>
#include <random>

using namespace sawaml;
using namespace sawaml::testing;

TEST_CASE("trajectory CSV round trip is exact") {
  TempDir dir("io");
  std::mt19937_64 rng(111);
  Trajectory t(0.05);
  for (int k = 0; k < 50; ++k) t.push_back(k, random_pose(rng, 1e3));
  io::write_trajectory(dir / "t.csv", t);
  const auto back = io::read_trajectory(dir / "t.csv");
  REQUIRE(back.size() == t.size());
  CHECK(back.dt() == doctest::Approx(0.05).epsilon(1e-12));
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(back[k].stamp == t[k].stamp);
    CHECK(back[k].pose.translation == t[k].pose.translation);
    CHECK(frobenius_pose_distance(back[k].pose, t[k].pose) < 1e-12);
  }
  const auto text = io::read_text(dir / "t.csv");
  CHECK(text.rfind("step,t,x,y,z,qw,qx,qy,qz\n", 0) == 0);
}

TEST_CASE("range CSV uses 1-based ids") {
  TempDir dir("io");
  const std::vector<RawRange> r{{0, 1, 0, 5.5}, {2, 4, 1, 3.25}};
  io::write_ranges(dir / "r.csv", r);
  const auto text = io::read_text(dir / "r.csv");
  CHECK(text.find("\n0,1,2,5.5\n") != std::string::npos);
  const auto back = io::read_ranges(dir / "r.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].i == 2);
  CHECK(back[1].j == 4);
  CHECK(back[1].step == 1);
  CHECK(back[1].distance == 3.25);

  io::write_text(dir / "swapped.csv", "step,i,j,distance\n0,3,1,2.0\n");
  const auto swapped = io::read_ranges(dir / "swapped.csv");
  CHECK(swapped[0].i == 0);
  CHECK(swapped[0].j == 2);
}

TEST_CASE("malformed files are reported") {
  TempDir dir("io");
  auto bad = [&](const std::string& name, const std::string& text) {
    io::write_text(dir / name, text);
    return dir / name;
  };
  CHECK_THROWS_AS(io::read_ranges(dir / "missing.csv"), Error);
  CHECK_THROWS_AS(io::read_ranges(bad("h.csv", "a,b,c,d\n0,1,2,3\n")), Error);
  CHECK_THROWS_AS(io::read_ranges(bad("n.csv", "step,i,j,distance\n0,1,2,abc\n")), Error);
  CHECK_THROWS_AS(io::read_ranges(bad("c.csv", "step,i,j,distance\n0,1,2\n")), Error);
  CHECK_THROWS_AS(io::read_ranges(bad("s.csv", "step,i,j,distance\n0,1,1,3\n")), Error);
  CHECK_THROWS_AS(io::read_ranges(bad("neg.csv", "step,i,j,distance\n0,1,2,-3\n")), Error);
  CHECK_THROWS_AS(io::read_ranges(bad("o.csv", "step,i,j,distance\n4,1,2,3\n2,1,2,3\n")), Error);
  CHECK_THROWS_AS(io::read_trajectory(bad("e.csv", "step,t,x,y,z,qw,qx,qy,qz\n")), Error);
  CHECK_THROWS_AS(io::read_trajectory(bad("q.csv", "step,t,x,y,z,qw,qx,qy,qz\n0,0,1,2,3,0,0,0,0\n")),
                  Error);
  CHECK_THROWS_AS(
      io::read_trajectory(bad("d.csv", "step,t,x,y,z,qw,qx,qy,qz\n1,0,0,0,0,1,0,0,0\n1,0,0,0,0,1,0,0,0\n")),
      Error);
}

TEST_CASE("odometry CSV round trip") {
  TempDir dir("io");
  Trajectory vio(0.1);
  std::vector<OdomSample> s;
  for (int k = 0; k < 3; ++k) {
    vio.push_back(k, RigidPose::from_translation({double(k), 0, 0}));
    OdomSample o;
    o.stamp = {k};
    o.velocity = {1.0 / 3.0, -2.0, 0.5};
    o.yaw_rate = 0.1 * k;
    o.pitch_rate = 0.01;
    o.feature_depth = 4.0 + k;
    s.push_back(o);
  }
  io::write_odometry(dir / "o.csv", s);
  const auto back = io::read_odometry(dir / "o.csv", vio, 3);
  REQUIRE(back.size() == 3);
  CHECK(back[2].robot == 3);
  CHECK(back[2].velocity == s[2].velocity);
  CHECK(back[2].yaw_rate == s[2].yaw_rate);
  CHECK(back[2].feature_depth == 6.0);
  CHECK(back[2].local_pose.translation == Vec3(2, 0, 0));

  Trajectory short_vio(0.1);
  short_vio.push_back(0, RigidPose::identity());
  CHECK_THROWS_AS(io::read_odometry(dir / "o.csv", short_vio, 0), Error);
}

TEST_CASE("numbered trajectories stop at the first gap") {
  TempDir dir("io");
  Trajectory t(0.1);
  t.push_back(0, RigidPose::identity());
  io::write_trajectory(io::numbered(dir.path(), "gt", 1), t);
  io::write_trajectory(io::numbered(dir.path(), "gt", 2), t);
  io::write_trajectory(io::numbered(dir.path(), "gt", 4), t);
  CHECK(io::numbered(dir.path(), "gt", 2).filename() == "gt_2.csv");
  CHECK(io::read_numbered_trajectories(dir.path(), "gt").size() == 2);
  CHECK(io::read_numbered_trajectories(dir.path(), "vio").empty());
}

TEST_CASE("artifact tables") {
  TempDir dir("io");
  AnchorNodeSet a;
  a.epoch = 1;
  a.stamp = {200};
  a.positions = {{0, 0, 0}, {1, 2, 3}};
  a.mirrored = true;
  a.costs = {4.0, 0.5};
  io::write_anchors(dir / "anchors.csv", std::vector<AnchorNodeSet>{a}, 0.1);
  const auto text = io::read_text(dir / "anchors.csv");
  CHECK(text.find("epoch,step,t,robot,x,y,z,mirrored,cost,cost_rejected\n") == 0);
  CHECK(text.find("\n1,200,20,2,1,2,3,1,0.5,4\n") != std::string::npos);

  WeightSet w;
  w.epoch = 2;
  w.robots.resize(3);
  io::write_weights(dir / "weights.csv", std::vector<WeightSet>{w});
  std::ifstream in(dir / "weights.csv");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 4);
}

#include "doctest.h"

#include "sawaml/error.hpp"
#include "sawaml/scenario.hpp"

using namespace sawaml;

TEST_CASE("presets are valid") {
  for (const char* name : {"default", "robot4_scale_error", "noiseless"}) {
    const auto c = preset_scenario(name);
    CHECK(c.name == name);
    CHECK(c.robot_count() == 5);
    CHECK_NOTHROW(c.validate());
  }
  const auto faulty = preset_scenario("robot4_scale_error");
  CHECK(faulty.robots[3].vio.scale == Vec3::Constant(1.3));
  CHECK(faulty.robots[3].vio.drift_rate == doctest::Approx(0.02));
  CHECK(faulty.uwb.sigma == doctest::Approx(0.1));
  CHECK(faulty.uwb.p_nlos == doctest::Approx(0.05));
  const auto clean = preset_scenario("noiseless");
  for (const auto& r : clean.robots) {
    CHECK(r.vio.scale == Vec3::Ones());
    CHECK(r.vio.sigma_p == 0.0);
  }
  CHECK_THROWS_AS(preset_scenario("nope"), ConfigError);
}

TEST_CASE("step count arithmetic") {
  ScenarioConfig c = preset_scenario("default");
  c.dt = 0.1;
  c.duration = 60.0;
  CHECK(c.steps() == 601);
  c.duration = 240.0;
  CHECK(c.steps() == 2401);
}

TEST_CASE("library defaults") {
  const PipelineParams p;
  CHECK(p.epsilon == 1e-6);
  CHECK(p.min_anchor_spacing == 1.0);
  CHECK(p.correction.epsilon_motion == 0.05);
  CHECK(p.correction.scale_min == 0.5);
  CHECK(p.correction.scale_max == 2.0);
  CHECK(p.global.lambda_range == 1.0);
  CHECK(p.global.lambda_vio == 1.0);
  CHECK(p.global.max_iterations == 20);
}

TEST_CASE("YAML documents override the preset") {
  const auto c = parse_scenario(R"(
schema_version: 1
preset: robot4_scale_error
name: mine
seed: 9
duration: 30
initial_pose_mode: unknown
uwb:
  sigma: 0.2
  nlos_bias: [0.5, 4]
pipeline:
  zeta: 12.5
  min_anchor_spacing: 2
  scale_feedback_frame: local
robots:
  - vio:
      scale: [1.1, 1.0, 0.9]
  -
  -
  - trajectory:
      type: circle
      radius: 6
)");
  CHECK(c.name == "mine");
  CHECK(c.seed == 9);
  CHECK(c.duration == 30.0);
  CHECK(c.initial_mode == InitialPoseMode::Unknown);
  CHECK(c.uwb.sigma == 0.2);
  CHECK(c.uwb.p_nlos == doctest::Approx(0.05));
  CHECK(c.uwb.bias_min == 0.5);
  CHECK(c.uwb.bias_max == 4.0);
  CHECK(c.zeta() == 12.5);
  CHECK(c.pipeline.min_anchor_spacing == 2.0);
  CHECK(c.pipeline.feedback_frame == ScaleFeedbackFrame::Local);
  REQUIRE(c.robot_count() == 5);
  CHECK(c.robots[0].vio.scale == Vec3(1.1, 1.0, 0.9));
  CHECK(c.robots[3].trajectory.kind == TrajectoryKind::Circle);
  CHECK(c.robots[3].trajectory.radius == 6.0);
  CHECK(c.robots[3].vio.scale == Vec3::Constant(1.3));
}

TEST_CASE("dotted overrides") {
  const auto c = parse_scenario("preset: default\n", {{"robots.3.vio.drift_rate", "0.1"},
                                                      {"pipeline.zeta", "auto"},
                                                      {"seed", "4"}});
  CHECK(c.robot_count() == 5);
  CHECK(c.robots[3].vio.drift_rate == 0.1);
  CHECK(c.robots[2].vio.drift_rate == doctest::Approx(0.02));
  CHECK_FALSE(c.pipeline.zeta.has_value());
  CHECK(c.zeta() == default_zeta(5));
  CHECK(c.seed == 4);

  const auto empty = parse_scenario("", {{"uwb.sigma", "0.3"}});
  CHECK(empty.uwb.sigma == 0.3);
  CHECK(empty.name == "custom");
}

TEST_CASE("robot count can be changed") {
  const auto c = parse_scenario("robot_count: 4\n");
  CHECK(c.robot_count() == 4);
  CHECK_THROWS_AS(parse_scenario("robot_count: 3\n"), ConfigError);
}

TEST_CASE("invalid documents are rejected") {
  CHECK_THROWS_AS(parse_scenario("schema_version: 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("dt: 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("dt: 0.1\nduration: 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("uwb: {sigma: -1}\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("uwb: {p_nlos: 0.5}\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("uwb: {nlos_bias: [3, 1]}\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("robots: [{trajectory: {type: waypoints, waypoints: [[0,0,0]]}}]\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_scenario("robots: [{trajectory: {type: spiral}}]\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("robots: [{vio: {scale: [1, 0, 1]}}]\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("initial_pose_mode: maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("seed: [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("- a\n- b\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("duration: fast\n"), ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/missing.cfg"), ConfigError);
}

TEST_CASE("YAML round trip") {
  auto c = preset_scenario("robot4_scale_error");
  c.seed = 12345678901ULL;
  c.robots[1].vio.depth_profile = {{0.0, 8.0}, {30.0, 2.5}};
  c.robots[2].trajectory.kind = TrajectoryKind::Waypoints;
  c.robots[2].trajectory.waypoints = {{0, 0, 0}, {10, 0.1, 0}, {10, 10, 1.0 / 3.0}};
  c.pipeline.zeta.reset();
  const std::string text = scenario_to_yaml(c);
  const auto back = parse_scenario(text);
  CHECK(scenario_to_yaml(back) == text);
  CHECK(back.seed == c.seed);
  CHECK(back.robots[2].trajectory.waypoints[2].z() == 1.0 / 3.0);
  CHECK(back.robots[1].vio.depth_at(31.0) == 2.5);
  CHECK(back.robots[1].vio.depth_at(29.0) == 8.0);
  CHECK_FALSE(back.pipeline.zeta.has_value());
}

#include "sawaml/scenario.hpp"

#include "sawaml/error.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace sawaml {

double VioNoise::depth_at(double t) const {
  double depth = depth_profile.empty() ? 10.0 : depth_profile.front().second;
  for (const auto& [start, value] : depth_profile) {
    if (t >= start) depth = value;
  }
  return depth;
}

std::int64_t ScenarioConfig::steps() const {
  return static_cast<std::int64_t>(std::floor(duration / dt + 1e-9)) + 1;
}

double ScenarioConfig::zeta() const {
  return pipeline.zeta ? *pipeline.zeta : default_zeta(robot_count());
}

void ScenarioConfig::validate() const {
  if (schema_version != kScenarioSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(schema_version));
  }
  if (robot_count() < 4) throw ConfigError("scenario needs at least 4 robots");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(duration >= 10.0 * dt)) throw ConfigError("duration must cover at least 10 steps");
  if (uwb.sigma < 0.0) throw ConfigError("uwb.sigma must be non-negative");
  if (!(uwb.p_nlos >= 0.0 && uwb.p_nlos < 0.5)) throw ConfigError("uwb.p_nlos must lie in [0, 0.5)");
  if (uwb.bias_min < 0.0 || uwb.bias_max < uwb.bias_min) {
    throw ConfigError("uwb.nlos_bias must be an ordered non-negative interval");
  }
  if (uwb.samples_per_step < 1) throw ConfigError("uwb.samples_per_step must be >= 1");
  for (const auto& r : robots) {
    if (r.vio.sigma_p < 0.0 || r.vio.sigma_rot < 0.0) throw ConfigError("VIO sigmas must be non-negative");
    if ((r.vio.scale.array() <= 0.0).any()) throw ConfigError("VIO scale factors must be positive");
    for (const auto& [t, depth] : r.vio.depth_profile) {
      if (!(depth > 0.0)) throw ConfigError("feature depth must be positive");
    }
    if (r.trajectory.kind == TrajectoryKind::Waypoints && r.trajectory.waypoints.size() < 2) {
      throw ConfigError("waypoint trajectory needs at least 2 points");
    }
    if (r.trajectory.kind == TrajectoryKind::Lawnmower &&
        (r.trajectory.lanes < 2 || r.trajectory.lanes % 2 != 0)) {
      throw ConfigError("lawnmower needs an even number of lanes");
    }
  }
  pipeline.fov.validate();
  const auto& c = pipeline.correction;
  if (!(c.scale_min > 0.0 && c.scale_min <= 1.0 && c.scale_max >= 1.0)) {
    throw ConfigError("scale clamp must satisfy 0 < scale_min <= 1 <= scale_max");
  }
  if (!(pipeline.epsilon > 0.0)) throw ConfigError("pipeline.epsilon must be positive");
  if (pipeline.min_anchor_spacing < dt) throw ConfigError("min_anchor_spacing must be at least dt");
}

namespace {

RobotSpec lawnmower_robot(Vec3 origin, double speed, double lane_length, double spacing, int lanes,
                          double phase) {
  RobotSpec r;
  r.trajectory.kind = TrajectoryKind::Lawnmower;
  r.trajectory.origin = origin;
  r.trajectory.speed = speed;
  r.trajectory.lane_length = lane_length;
  r.trajectory.lane_spacing = spacing;
  r.trajectory.lanes = lanes;
  r.trajectory.turn_radius = 2.0;
  r.trajectory.altitude_amplitude = 0.8;
  r.trajectory.altitude_period = 25.0;
  r.trajectory.altitude_phase = phase;
  return r;
}

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.name = "default";
  c.seed = 1;
  c.duration = 240.0;
  c.dt = 0.1;
  c.uwb.sigma = 0.1;
  c.uwb.p_nlos = 0.05;
  c.uwb.bias_min = 1.0;
  c.uwb.bias_max = 3.0;
  c.uwb.samples_per_step = 5;
  c.pipeline.zeta = 40.0;
  c.pipeline.min_anchor_spacing = 20.0;
  c.pipeline.correction.epsilon_motion = 3.0;

  // Five robots on separate altitude layers, all facing +x at start.
  c.robots = {
      lawnmower_robot({0.0, 0.0, 3.0}, 1.0, 40.0, 8.0, 4, 0.0),
      lawnmower_robot({5.0, 12.0, 6.0}, 0.85, 30.0, 6.0, 6, 1.3),
      lawnmower_robot({-5.0, -10.0, 9.0}, 1.15, 50.0, 10.0, 2, 2.6),
      lawnmower_robot({10.0, -4.0, 12.0}, 0.9, 35.0, 7.0, 4, 3.9),
      lawnmower_robot({-8.0, 6.0, 15.0}, 1.1, 45.0, 5.0, 4, 5.2),
  };
  const Vec3 scales[5] = {{1.03, 0.98, 1.02}, {0.97, 1.03, 0.99}, {1.04, 1.02, 0.97},
                          {0.98, 0.97, 1.03}, {1.02, 1.04, 1.01}};
  for (int i = 0; i < 5; ++i) {
    auto& v = c.robots[i].vio;
    v.scale = scales[i];
    v.drift_rate = 0.02;
    v.sigma_p = 0.01;
    v.sigma_rot = 0.002;
  }
  return c;
}

}  // namespace

ScenarioConfig preset_scenario(std::string_view name) {
  if (name == "default") return default_scenario();
  if (name == "robot4_scale_error") {
    ScenarioConfig c = default_scenario();
    c.name = "robot4_scale_error";
    c.robots[3].vio.scale = Vec3::Constant(1.3);
    return c;
  }
  if (name == "noiseless") {
    ScenarioConfig c = default_scenario();
    c.name = "noiseless";
    c.duration = 60.0;
    c.uwb.sigma = 0.0;
    c.uwb.p_nlos = 0.0;
    c.uwb.samples_per_step = 1;
    c.pipeline.filter.ma_window = 1;
    c.pipeline.filter.ransac_window = 1;
    c.pipeline.filter.ransac_min_samples = 1;
    c.pipeline.zeta = 1e-3;
    c.pipeline.min_anchor_spacing = 5.0;
    for (auto& r : c.robots) r.vio = VioNoise{};
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// YAML conversion

namespace {

Vec3 as_vec3(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() != 3) throw ConfigError(key + " must be a 3-element list");
  return {n[0].as<double>(), n[1].as<double>(), n[2].as<double>()};
}

template <typename T>
void read(const YAML::Node& parent, const char* key, T& out) {
  if (const auto n = parent[key]) {
    try {
      out = n.as<T>();
    } catch (const YAML::Exception& e) {
      throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

void read_vec3(const YAML::Node& parent, const char* key, Vec3& out) {
  if (const auto n = parent[key]) out = as_vec3(n, key);
}

TrajectoryKind parse_kind(const std::string& s) {
  if (s == "stationary") return TrajectoryKind::Stationary;
  if (s == "circle") return TrajectoryKind::Circle;
  if (s == "lawnmower") return TrajectoryKind::Lawnmower;
  if (s == "lissajous") return TrajectoryKind::Lissajous;
  if (s == "waypoints") return TrajectoryKind::Waypoints;
  throw ConfigError("unknown trajectory type '" + s + "'");
}

const char* kind_name(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::Stationary: return "stationary";
    case TrajectoryKind::Circle: return "circle";
    case TrajectoryKind::Lawnmower: return "lawnmower";
    case TrajectoryKind::Lissajous: return "lissajous";
    case TrajectoryKind::Waypoints: return "waypoints";
  }
  return "stationary";
}

void read_trajectory(const YAML::Node& n, TrajectorySpec& t) {
  if (const auto k = n["type"]) t.kind = parse_kind(k.as<std::string>());
  read_vec3(n, "origin", t.origin);
  read(n, "speed", t.speed);
  read(n, "yaw", t.yaw);
  read(n, "radius", t.radius);
  read(n, "phase", t.phase);
  read(n, "lane_length", t.lane_length);
  read(n, "lane_spacing", t.lane_spacing);
  read(n, "lanes", t.lanes);
  read(n, "turn_radius", t.turn_radius);
  read_vec3(n, "amplitude", t.amplitude);
  read_vec3(n, "frequency", t.frequency);
  read_vec3(n, "phases", t.phases);
  if (const auto w = n["waypoints"]) {
    t.waypoints.clear();
    for (const auto& p : w) t.waypoints.push_back(as_vec3(p, "waypoints[]"));
  }
  read(n, "closed", t.closed);
  read(n, "altitude_amplitude", t.altitude_amplitude);
  read(n, "altitude_period", t.altitude_period);
  read(n, "altitude_phase", t.altitude_phase);
}

void read_vio(const YAML::Node& n, VioNoise& v) {
  if (const auto s = n["scale"]) {
    v.scale = s.IsScalar() ? Vec3::Constant(s.as<double>()) : as_vec3(s, "scale");
  }
  read(n, "drift_rate", v.drift_rate);
  read(n, "sigma_p", v.sigma_p);
  read(n, "sigma_rot", v.sigma_rot);
  if (const auto d = n["depth"]) {
    v.depth_profile.clear();
    if (d.IsScalar()) {
      v.depth_profile.emplace_back(0.0, d.as<double>());
    } else {
      for (const auto& seg : d) {
        if (!seg.IsSequence() || seg.size() != 2) throw ConfigError("depth entries must be [time, depth]");
        v.depth_profile.emplace_back(seg[0].as<double>(), seg[1].as<double>());
      }
    }
  }
}

void read_pipeline(const YAML::Node& n, PipelineParams& p) {
  if (const auto z = n["zeta"]) {
    if (z.IsNull() || (z.IsScalar() && z.as<std::string>() == "auto")) {
      p.zeta.reset();
    } else {
      p.zeta = z.as<double>();
    }
  }
  read(n, "epsilon", p.epsilon);
  read(n, "epsilon_motion", p.correction.epsilon_motion);
  read(n, "scale_min", p.correction.scale_min);
  read(n, "scale_max", p.correction.scale_max);
  read(n, "ma_window", p.filter.ma_window);
  read(n, "ransac_window", p.filter.ransac_window);
  read(n, "ransac_min_samples", p.filter.ransac_min_samples);
  read(n, "ransac_threshold", p.filter.inlier_threshold);
  read(n, "ransac_iterations", p.filter.ransac_iterations);
  read(n, "lambda_range", p.global.lambda_range);
  read(n, "lambda_vio", p.global.lambda_vio);
  read(n, "global_max_iterations", p.global.max_iterations);
  read(n, "structure_max_iterations", p.structure.max_iterations);
  read(n, "min_anchor_spacing", p.min_anchor_spacing);
  read(n, "init_window", p.init_window);
  read(n, "init_motion_window", p.init_motion_window);
  if (const auto f = n["scale_feedback_frame"]) {
    const auto s = f.as<std::string>();
    if (s == "world") {
      p.feedback_frame = ScaleFeedbackFrame::World;
    } else if (s == "local") {
      p.feedback_frame = ScaleFeedbackFrame::Local;
    } else {
      throw ConfigError("scale_feedback_frame must be 'world' or 'local'");
    }
  }
}

void set_path(YAML::Node root, const std::string& path, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  if (parts.empty()) throw ConfigError("empty override path");

  YAML::Node node = root;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& key = parts[k];
    const bool last = k + 1 == parts.size();
    const bool index = !key.empty() && key.find_first_not_of("0123456789") == std::string::npos;
    if (index) {
      const std::size_t i = std::stoul(key);
      if (!node.IsSequence()) throw ConfigError("override path '" + path + "' indexes a non-list");
      while (node.size() <= i) node.push_back(YAML::Node(YAML::NodeType::Map));
      if (last) {
        node[i] = YAML::Load(value);
      } else {
        node.reset(node[i]);
      }
    } else {
      if (last) {
        node[key] = YAML::Load(value);
      } else {
        if (!node[key]) {
          const bool next_index = parts[k + 1].find_first_not_of("0123456789") == std::string::npos;
          node[key] = YAML::Node(next_index ? YAML::NodeType::Sequence : YAML::NodeType::Map);
        }
        node.reset(node[key]);
      }
    }
  }
}

ScenarioConfig from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("scenario document must be a mapping");
  ScenarioConfig c;
  if (const auto p = root["preset"]) {
    c = preset_scenario(p.as<std::string>());
  } else {
    c = preset_scenario("default");
    c.name = "custom";
  }
  read(root, "schema_version", c.schema_version);
  read(root, "name", c.name);
  read(root, "seed", c.seed);
  read(root, "duration", c.duration);
  read(root, "dt", c.dt);
  if (const auto m = root["initial_pose_mode"]) {
    const auto s = m.as<std::string>();
    if (s == "known") {
      c.initial_mode = InitialPoseMode::Known;
    } else if (s == "unknown") {
      c.initial_mode = InitialPoseMode::Unknown;
    } else {
      throw ConfigError("initial_pose_mode must be 'known' or 'unknown'");
    }
  }
  if (const auto cam = root["camera"]) {
    read(cam, "fov_h", c.pipeline.fov.horizontal);
    read(cam, "fov_v", c.pipeline.fov.vertical);
  }
  if (const auto u = root["uwb"]) {
    read(u, "sigma", c.uwb.sigma);
    read(u, "p_nlos", c.uwb.p_nlos);
    if (const auto b = u["nlos_bias"]) {
      if (!b.IsSequence() || b.size() != 2) throw ConfigError("uwb.nlos_bias must be [min, max]");
      c.uwb.bias_min = b[0].as<double>();
      c.uwb.bias_max = b[1].as<double>();
    }
    read(u, "samples_per_step", c.uwb.samples_per_step);
  }
  if (const auto p = root["pipeline"]) read_pipeline(p, c.pipeline);
  if (const auto k = root["robot_count"]) {
    const int count = k.as<int>();
    if (count < 1) throw ConfigError("robot_count must be positive");
    c.robots.resize(static_cast<std::size_t>(count));
  }
  if (const auto r = root["robots"]) {
    if (!r.IsSequence()) throw ConfigError("robots must be a list");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i >= c.robots.size()) c.robots.emplace_back();
      if (const auto t = r[i]["trajectory"]) read_trajectory(t, c.robots[i].trajectory);
      if (const auto v = r[i]["vio"]) read_vio(v, c.robots[i].vio);
    }
  }
  c.validate();
  return c;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& overrides) {
  try {
    YAML::Node root = YAML::Load(std::string(text));
    if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    for (const auto& [path, value] : overrides) set_path(root, path, value);
    return from_yaml(root);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed scenario: ") + e.what());
  }
}

ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), overrides);
}

std::string scenario_to_yaml(const ScenarioConfig& c) {
  auto vec = [](const Vec3& v) {
    YAML::Node n(YAML::NodeType::Sequence);
    n.SetStyle(YAML::EmitterStyle::Flow);
    for (int k = 0; k < 3; ++k) n.push_back(v[k]);
    return n;
  };
  YAML::Node root;
  root["schema_version"] = c.schema_version;
  root["name"] = c.name;
  root["seed"] = c.seed;
  root["duration"] = c.duration;
  root["dt"] = c.dt;
  root["initial_pose_mode"] = c.initial_mode == InitialPoseMode::Known ? "known" : "unknown";
  root["robot_count"] = c.robot_count();
  root["camera"]["fov_h"] = c.pipeline.fov.horizontal;
  root["camera"]["fov_v"] = c.pipeline.fov.vertical;
  root["uwb"]["sigma"] = c.uwb.sigma;
  root["uwb"]["p_nlos"] = c.uwb.p_nlos;
  YAML::Node bias(YAML::NodeType::Sequence);
  bias.SetStyle(YAML::EmitterStyle::Flow);
  bias.push_back(c.uwb.bias_min);
  bias.push_back(c.uwb.bias_max);
  root["uwb"]["nlos_bias"] = bias;
  root["uwb"]["samples_per_step"] = c.uwb.samples_per_step;

  auto p = root["pipeline"];
  if (c.pipeline.zeta) {
    p["zeta"] = *c.pipeline.zeta;
  } else {
    p["zeta"] = "auto";
  }
  p["epsilon"] = c.pipeline.epsilon;
  p["epsilon_motion"] = c.pipeline.correction.epsilon_motion;
  p["scale_min"] = c.pipeline.correction.scale_min;
  p["scale_max"] = c.pipeline.correction.scale_max;
  p["ma_window"] = c.pipeline.filter.ma_window;
  p["ransac_window"] = c.pipeline.filter.ransac_window;
  p["ransac_min_samples"] = c.pipeline.filter.ransac_min_samples;
  p["ransac_threshold"] = c.pipeline.filter.inlier_threshold;
  p["ransac_iterations"] = c.pipeline.filter.ransac_iterations;
  p["lambda_range"] = c.pipeline.global.lambda_range;
  p["lambda_vio"] = c.pipeline.global.lambda_vio;
  p["global_max_iterations"] = c.pipeline.global.max_iterations;
  p["structure_max_iterations"] = c.pipeline.structure.max_iterations;
  p["min_anchor_spacing"] = c.pipeline.min_anchor_spacing;
  p["scale_feedback_frame"] =
      c.pipeline.feedback_frame == ScaleFeedbackFrame::World ? "world" : "local";
  p["init_window"] = c.pipeline.init_window;
  p["init_motion_window"] = c.pipeline.init_motion_window;

  for (const auto& r : c.robots) {
    YAML::Node robot;
    const auto& t = r.trajectory;
    auto tn = robot["trajectory"];
    tn["type"] = kind_name(t.kind);
    tn["origin"] = vec(t.origin);
    tn["speed"] = t.speed;
    tn["yaw"] = t.yaw;
    tn["radius"] = t.radius;
    tn["phase"] = t.phase;
    tn["lane_length"] = t.lane_length;
    tn["lane_spacing"] = t.lane_spacing;
    tn["lanes"] = t.lanes;
    tn["turn_radius"] = t.turn_radius;
    tn["amplitude"] = vec(t.amplitude);
    tn["frequency"] = vec(t.frequency);
    tn["phases"] = vec(t.phases);
    YAML::Node wps(YAML::NodeType::Sequence);
    for (const auto& w : t.waypoints) wps.push_back(vec(w));
    tn["waypoints"] = wps;
    tn["closed"] = t.closed;
    tn["altitude_amplitude"] = t.altitude_amplitude;
    tn["altitude_period"] = t.altitude_period;
    tn["altitude_phase"] = t.altitude_phase;
    auto vn = robot["vio"];
    vn["scale"] = vec(r.vio.scale);
    vn["drift_rate"] = r.vio.drift_rate;
    vn["sigma_p"] = r.vio.sigma_p;
    vn["sigma_rot"] = r.vio.sigma_rot;
    YAML::Node depth(YAML::NodeType::Sequence);
    for (const auto& [start, value] : r.vio.depth_profile) {
      YAML::Node seg(YAML::NodeType::Sequence);
      seg.SetStyle(YAML::EmitterStyle::Flow);
      seg.push_back(start);
      seg.push_back(value);
      depth.push_back(seg);
    }
    vn["depth"] = depth;
    root["robots"].push_back(robot);
  }
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << root;
  return std::string(out.c_str()) + "\n";
}

}  // namespace sawaml

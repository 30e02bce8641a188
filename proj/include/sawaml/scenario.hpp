#pragma once

#include "sawaml/correction.hpp"
#include "sawaml/geometry.hpp"
#include "sawaml/global_estimator.hpp"
#include "sawaml/range_pipeline.hpp"
#include "sawaml/structure.hpp"
#include "sawaml/weights.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sawaml {

inline constexpr int kScenarioSchemaVersion = 1;

enum class TrajectoryKind { Stationary, Circle, Lawnmower, Lissajous, Waypoints };

/// Parametric ground-truth path of one robot. Fields not used by `kind` are ignored.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Stationary;
  Vec3 origin = Vec3::Zero();
  double speed = 1.0;
  /// Stationary heading (rad).
  double yaw = 0.0;

  // circle
  double radius = 10.0;
  double phase = 0.0;

  // lawnmower: lanes along +x, stepping +y, closed loop back to the start
  double lane_length = 40.0;
  double lane_spacing = 8.0;
  int lanes = 4;
  double turn_radius = 2.0;

  // lissajous: origin + amplitude * sin(frequency * t + phases)
  Vec3 amplitude = Vec3::Zero();
  Vec3 frequency = Vec3::Zero();
  Vec3 phases = Vec3::Zero();

  // waypoints (offsets from origin), optionally closed
  std::vector<Vec3> waypoints;
  bool closed = false;

  // vertical oscillation added to every kind except stationary
  double altitude_amplitude = 0.0;
  double altitude_period = 30.0;
  double altitude_phase = 0.0;
};

struct VioNoise {
  Vec3 scale = Vec3::Ones();
  /// Extra displacement along the motion direction per meter travelled.
  double drift_rate = 0.0;
  /// Per-step white translation noise (m).
  double sigma_p = 0.0;
  /// Rotation random walk (rad / sqrt(s)).
  double sigma_rot = 0.0;
  /// Piecewise-constant mean feature depth: (start time s, depth m).
  std::vector<std::pair<double, double>> depth_profile{{0.0, 10.0}};

  double depth_at(double t) const;
};

struct UwbParams {
  double sigma = 0.1;
  double p_nlos = 0.0;
  double bias_min = 1.0;
  double bias_max = 3.0;
  /// Range samples per pipeline step (5 at dt = 0.1 s gives 50 Hz).
  int samples_per_step = 5;
};

enum class ScaleFeedbackFrame { World, Local };

struct PipelineParams {
  /// Structure acceptance threshold (m^2); default_zeta(N) when unset.
  std::optional<double> zeta;
  double epsilon = 1e-6;
  CorrectionOptions correction;
  FilterOptions filter;
  GlobalOptions global;
  StructureOptions structure;
  CameraFov fov;
  double min_anchor_spacing = 1.0;
  ScaleFeedbackFrame feedback_frame = ScaleFeedbackFrame::World;
  /// Unknown-initial mode: time allowed to find the first structure (s).
  double init_window = 5.0;
  /// Unknown-initial mode: motion used to orient that structure (s).
  double init_motion_window = 60.0;
};

struct RobotSpec {
  TrajectorySpec trajectory;
  VioNoise vio;
};

struct ScenarioConfig {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "custom";
  std::uint64_t seed = 1;
  double duration = 60.0;
  double dt = 0.1;
  InitialPoseMode initial_mode = InitialPoseMode::Known;
  UwbParams uwb;
  PipelineParams pipeline;
  std::vector<RobotSpec> robots;

  int robot_count() const { return static_cast<int>(robots.size()); }
  /// Number of pose nodes: floor(duration / dt) + 1.
  std::int64_t steps() const;
  double zeta() const;
  /// Throws ConfigError on any violated constraint.
  void validate() const;
};

/// Built-in scenarios: "default", "robot4_scale_error", "noiseless".
ScenarioConfig preset_scenario(std::string_view name);

/// Parses a YAML scenario document. A `preset` key selects the base that the
/// remaining keys override. `overrides` are dotted paths (e.g.
/// "pipeline.zeta" or "robots.3.vio.drift_rate") with YAML scalar values,
/// applied before conversion.
ScenarioConfig parse_scenario(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {});
ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Full YAML form of a config (every field explicit).
std::string scenario_to_yaml(const ScenarioConfig& config);

}  // namespace sawaml

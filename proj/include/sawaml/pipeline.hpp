#pragma once

#include "sawaml/alignment.hpp"
#include "sawaml/correction.hpp"
#include "sawaml/frame_init.hpp"
#include "sawaml/geometry.hpp"
#include "sawaml/global_estimator.hpp"
#include "sawaml/range_pipeline.hpp"
#include "sawaml/scenario.hpp"
#include "sawaml/simulator.hpp"
#include "sawaml/structure.hpp"
#include "sawaml/weights.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sawaml {

/// Everything the localization pipeline consumes. Robot 0 defines the
/// world frame.
struct PipelineInput {
  double dt = 0.1;
  /// Local VIO trajectory per robot, identity at step 0, shared step grid.
  std::vector<Trajectory> vio;
  /// Per robot, one sample per step.
  std::vector<std::vector<OdomSample>> odom;
  /// Raw ranges ordered by step.
  std::vector<RawRange> ranges;
  InitialPoseMode mode = InitialPoseMode::Known;
  /// Ground-truth initial poses, used only in known-initial mode.
  std::vector<RigidPose> gt_initial;
  PipelineParams params;
  double zeta = 1.0;
  std::uint64_t seed = 1;
};

struct ScaleRecord {
  int epoch = 0;
  Timestamp stamp;
  std::vector<ScaleState> states;
};

struct PipelineOutput {
  std::vector<RigidPose> initials;
  /// Per-step output of the global optimizer.
  std::vector<Trajectory> global;
  /// Global estimates with every completed epoch corrected toward its anchor.
  std::vector<Trajectory> corrected;
  std::vector<AnchorNodeSet> anchors;
  std::vector<WeightSet> weights;
  std::vector<ScaleRecord> scales;
  std::vector<StructureEstimate> structures;
  std::vector<std::int64_t> diverged_steps;
  int rejected_structures = 0;
  /// Unknown-initial mode: step of the structure used for initialization.
  std::optional<std::int64_t> init_step;
  std::optional<FrameInitResult> init_frame;
};

/// Runs filtering, global optimization, structure estimation, weighting,
/// alignment and correction over the whole log. Throws
/// Error("initialization failed") in unknown-initial mode when no structure
/// is accepted within the startup window.
PipelineOutput run_localization(const PipelineInput& input);

struct SimulatedRun {
  ScenarioConfig config;
  GroundTruth gt;
  std::vector<VioOutput> vio;
  std::vector<RawRange> raw_ranges;
  PipelineOutput output;
};

/// Simulates a scenario and runs the pipeline on it. Deterministic in
/// (config, config.seed).
SimulatedRun run_pipeline(const ScenarioConfig& config);

}  // namespace sawaml

#include "sawaml/pipeline.hpp"

#include "sawaml/error.hpp"

#include <cmath>

namespace sawaml {
namespace {

// Feeds raw ranges step by step into a filter bank.
class RangeFeed {
 public:
  RangeFeed(const PipelineInput& input, int robots)
      : ranges_(input.ranges),
        bank_(robots, input.params.filter, input.seed) {}

  RangeSet next(std::int64_t step) {
    while (cursor_ < ranges_.size() && ranges_[cursor_].step <= step) {
      bank_.push(ranges_[cursor_]);
      ++cursor_;
    }
    return bank_.emit({step});
  }

 private:
  const std::vector<RawRange>& ranges_;
  RangeFilterBank bank_;
  std::size_t cursor_ = 0;
};

std::optional<StructureEstimate> try_structure(const RangeSet& ranges,
                                               const std::optional<std::vector<Vec3>>& warm,
                                               const PipelineParams& params, double zeta) {
  auto attempt = [&](const std::optional<std::vector<Vec3>>& init) -> std::optional<StructureEstimate> {
    try {
      auto est = estimate_structure(ranges, init, params.structure);
      if (accept_structure(est, zeta)) return est;
    } catch (const NumericalError&) {
    }
    return std::nullopt;
  };
  if (warm) {
    if (auto est = attempt(warm)) return est;
  }
  return attempt(std::nullopt);
}

void check_input(const PipelineInput& input) {
  const std::size_t n = input.vio.size();
  if (n < 3) throw PreconditionError("pipeline needs at least three robots");
  if (input.odom.size() != n) throw PreconditionError("odometry and VIO robot counts differ");
  const std::size_t steps = input.vio.front().size();
  if (steps == 0) throw PreconditionError("empty VIO trajectory");
  for (std::size_t i = 0; i < n; ++i) {
    if (input.vio[i].size() != steps || input.odom[i].size() != steps) {
      throw PreconditionError("robot streams differ in length");
    }
    for (std::size_t k = 0; k < steps; ++k) {
      if (input.vio[i][k].stamp.step != static_cast<std::int64_t>(k)) {
        throw PreconditionError("VIO steps must run 0, 1, 2, ...");
      }
    }
  }
  if (input.mode == InitialPoseMode::Known && input.gt_initial.size() != n) {
    throw PreconditionError("known-initial mode needs one initial pose per robot");
  }
}

// Unknown-initial mode: locate the first accepted structure, orient it with
// the motion that follows, and back out every robot's starting position.
std::vector<RigidPose> unknown_initials(const PipelineInput& input, PipelineOutput& out) {
  const int n = static_cast<int>(input.vio.size());
  const auto steps = static_cast<std::int64_t>(input.vio.front().size());
  const auto window = static_cast<std::int64_t>(std::floor(input.params.init_window / input.dt + 1e-9));
  const auto motion = static_cast<std::int64_t>(std::floor(input.params.init_motion_window / input.dt + 1e-9));

  RangeFeed feed(input, n);
  std::optional<StructureEstimate> first;
  std::int64_t a = 0;
  std::vector<RangeSet> history;
  for (std::int64_t t = 0; t < steps; ++t) {
    RangeSet rs = feed.next(t);
    if (!first) {
      if (t > window) break;
      if (rs.fully_valid()) {
        first = try_structure(rs, std::nullopt, input.params, input.zeta);
        if (first) a = t;
      }
    }
    if (first) {
      history.push_back(std::move(rs));
      if (t - a >= motion) break;
    }
  }
  if (!first) throw Error("initialization failed");

  std::vector<FrameInitSample> samples;
  for (std::size_t k = 0; k < history.size(); ++k) {
    FrameInitSample s;
    s.ranges = history[k];
    const std::int64_t t = a + static_cast<std::int64_t>(k);
    for (int i = 0; i < n; ++i) {
      s.displacements.push_back(input.vio[i][t].pose.translation - input.vio[i][a].pose.translation);
    }
    samples.push_back(std::move(s));
  }
  const FrameInitResult frame = resolve_initial_frame(*first, samples);

  std::vector<Vec3> starts;
  const Vec3 anchor0 = input.vio[0][a].pose.translation;
  for (int i = 0; i < n; ++i) {
    starts.push_back(anchor0 + frame.offsets[i] - input.vio[i][a].pose.translation);
  }
  out.init_step = a;
  out.init_frame = frame;
  return initialize_world(InitialPoseMode::Unknown, starts);
}

}  // namespace

PipelineOutput run_localization(const PipelineInput& input) {
  check_input(input);
  const auto& params = input.params;
  const int n = static_cast<int>(input.vio.size());
  const auto steps = static_cast<std::int64_t>(input.vio.front().size());
  const auto spacing = static_cast<std::int64_t>(std::ceil(params.min_anchor_spacing / input.dt - 1e-9));

  PipelineOutput out;
  out.initials = input.mode == InitialPoseMode::Known
                     ? initialize_world(InitialPoseMode::Known, std::nullopt, input.gt_initial)
                     : unknown_initials(input, out);
  const auto& initials = out.initials;

  std::vector<RigidPose> local(n, RigidPose::identity());  // scale-corrected VIO chain
  std::vector<RigidPose> current = initials;
  std::vector<ScaleState> scale(n);
  std::vector<std::vector<RigidPose>> corrected(n);
  for (auto& c : corrected) c.reserve(steps);
  out.global.assign(n, Trajectory(input.dt));

  std::int64_t last_anchor = 0;
  std::vector<Vec3> prev_anchor(n);
  for (int i = 0; i < n; ++i) prev_anchor[i] = initials[i].translation;
  std::optional<std::vector<Vec3>> warm_structure;
  // Scale-corrected VIO in the world frame since the last anchor. Weights and
  // the structure alignment both work on these.
  std::vector<std::vector<Vec3>> vio_rows;

  RangeFeed feed(input, n);
  for (std::int64_t t = 0; t < steps; ++t) {
    const RangeSet ranges = feed.next(t);

    if (t > 0) {
      std::vector<RigidPose> warm(n);
      for (int i = 0; i < n; ++i) {
        const RigidPose inc = compose(inverse(input.vio[i][t - 1].pose), input.vio[i][t].pose);
        const Vec3 dp = params.feedback_frame == ScaleFeedbackFrame::World
                            ? apply_scale_feedback_world(inc.translation, current[i].rotation, scale[i])
                            : apply_scale_feedback(inc.translation, scale[i]);
        const RigidPose step(inc.rotation, dp);
        local[i] = renormalize(compose(local[i], step));
        warm[i] = renormalize(compose(current[i], step));
      }
      try {
        current = optimize_step(warm, ranges, local, initials, params.global).poses;
      } catch (const NumericalError&) {
        current = warm;
        out.diverged_steps.push_back(t);
      }
    }
    std::vector<Vec3> vio_row(n);
    for (int i = 0; i < n; ++i) {
      out.global[i].push_back(t, current[i]);
      corrected[i].push_back(current[i]);
      vio_row[i] = initials[i].apply(local[i].translation);
    }
    if (t > 0) vio_rows.push_back(std::move(vio_row));

    if (t - last_anchor < spacing || !ranges.fully_valid()) continue;
    auto structure = try_structure(ranges, warm_structure, params, input.zeta);
    if (!structure) {
      ++out.rejected_structures;
      continue;
    }
    structure->stamp = {t};

    const int epoch = static_cast<int>(out.anchors.size()) + 1;
    const auto first = static_cast<std::size_t>(last_anchor + 1);
    const auto last = static_cast<std::size_t>(t);
    const Eigen::MatrixXd tilde = pairwise_distances(structure->positions);
    std::vector<RawWeights> raw(n);
    for (int i = 0; i < n; ++i) {
      const std::span<const OdomSample> samples(input.odom[i].data() + first, last - first + 1);
      raw[i].velocity = velocity_weight(samples, input.dt);
      raw[i].rotation = rotation_weight(samples, params.fov, input.dt);
      raw[i].consistency = consistency_weight(vio_rows, tilde, i, params.epsilon);
    }
    WeightSet weights = normalize_and_total(raw, epoch, {t});

    AnchorNodeSet anchor;
    try {
      anchor = select_mirror(*structure, vio_rows.back(), weights.totals(), epoch);
    } catch (const NumericalError&) {
      ++out.rejected_structures;
      continue;
    } catch (const PreconditionError&) {
      ++out.rejected_structures;
      continue;
    }
    anchor.stamp = {t};

    for (int i = 0; i < n; ++i) {
      std::vector<Vec3> nodes;
      nodes.push_back(corrected[i][last_anchor].translation);
      for (std::size_t s = first; s <= last; ++s) nodes.push_back(corrected[i][s].translation);
      const CorrectionBatch batch = correct_epoch(nodes, anchor.positions[i], i, epoch);
      for (std::size_t s = first; s <= last; ++s) {
        corrected[i][s].translation = batch.after[s - first + 1];
      }

      // The chain was re-based at the previous anchor, so both displacements
      // start from the same point.
      const Vec3 factors = scale_error(prev_anchor[i], anchor.positions[i], prev_anchor[i],
                                       vio_rows.back()[i], params.correction);
      scale[i] = update_scale_state(scale[i], factors, epoch, params.correction);

      // Drift feedback: the VIO chain restarts from the anchor.
      local[i].translation =
          initials[i].rotation.transpose() * (anchor.positions[i] - initials[i].translation);
      current[i].translation = anchor.positions[i];
      prev_anchor[i] = anchor.positions[i];
    }

    vio_rows.clear();
    out.anchors.push_back(std::move(anchor));
    out.weights.push_back(std::move(weights));
    out.scales.push_back({epoch, {t}, scale});
    warm_structure = structure->positions;
    out.structures.push_back(std::move(*structure));
    last_anchor = t;
  }

  out.corrected.assign(n, Trajectory(input.dt));
  for (int i = 0; i < n; ++i)
    for (std::int64_t t = 0; t < steps; ++t) out.corrected[i].push_back(t, corrected[i][t]);
  return out;
}

SimulatedRun run_pipeline(const ScenarioConfig& config) {
  config.validate();
  SimulatedRun run;
  run.config = config;
  run.gt = generate_ground_truth(config);
  const int n = config.robot_count();
  for (int i = 0; i < n; ++i) {
    run.vio.push_back(simulate_vio(run.gt.trajectories[i], config.robots[i].vio, config.seed, i));
  }
  run.raw_ranges = simulate_uwb(run.gt.trajectories, config.uwb, config.seed);

  PipelineInput input;
  input.dt = config.dt;
  for (const auto& v : run.vio) {
    input.vio.push_back(v.trajectory);
    input.odom.push_back(v.samples);
  }
  input.ranges = run.raw_ranges;
  input.mode = config.initial_mode;
  for (const auto& g : run.gt.trajectories) input.gt_initial.push_back(g.front().pose);
  input.params = config.pipeline;
  input.zeta = config.zeta();
  input.seed = make_rng(config.seed, streams::kRansac)();
  run.output = run_localization(input);
  return run;
}

}  // namespace sawaml

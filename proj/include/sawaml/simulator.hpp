#pragma once

#include "sawaml/geometry.hpp"
#include "sawaml/range_pipeline.hpp"
#include "sawaml/scenario.hpp"
#include "sawaml/weights.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace sawaml {

/// Continuous-time ground-truth path. Heading follows the horizontal
/// velocity; pitch and roll stay zero.
class TrajectoryModel {
 public:
  explicit TrajectoryModel(const TrajectorySpec& spec);
  ~TrajectoryModel();
  TrajectoryModel(TrajectoryModel&&) noexcept;
  TrajectoryModel& operator=(TrajectoryModel&&) noexcept;

  Vec3 position(double t) const;
  RigidPose pose(double t) const;

  struct Path;

 private:
  TrajectorySpec spec_;
  std::unique_ptr<Path> path_;
};

struct GroundTruth {
  std::vector<Trajectory> trajectories;
  std::vector<double> path_lengths;
};

/// Samples every robot on the dt grid. Throws ConfigError if two robots ever
/// come closer than 1 m.
GroundTruth generate_ground_truth(const ScenarioConfig& config);

struct VioOutput {
  Trajectory trajectory;
  std::vector<OdomSample> samples;
};

/// Dead-reckons noisy body-frame increments from the identity pose.
VioOutput simulate_vio(const Trajectory& gt, const VioNoise& params, std::uint64_t seed,
                       int robot = 0);

/// One corrupted range: truth + N(0, sigma), plus a uniform positive bias
/// with probability p_nlos. Never negative.
double sample_range(double truth, const UwbParams& params, std::mt19937_64& rng,
                    bool* nlos = nullptr);

/// `samples_per_step` measurements per pair per step at evenly spaced times
/// ending on the step, positions linearly interpolated between steps.
std::vector<RawRange> simulate_uwb(std::span<const Trajectory> gt, const UwbParams& params,
                                   std::uint64_t seed);

/// Independent, reproducible stream for (seed, stream).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

namespace streams {
inline constexpr std::uint64_t kUwb = 1;
inline constexpr std::uint64_t kRansac = 2;
inline constexpr std::uint64_t kVioBase = 100;
}  // namespace streams

}  // namespace sawaml

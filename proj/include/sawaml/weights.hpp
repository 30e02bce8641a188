#pragma once

#include "sawaml/geometry.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace sawaml {

/// One robot's odometry context at a step. Velocities are body/camera frame
/// with +x forward; rates are magnitudes of yaw and pitch rate.
struct OdomSample {
  int robot = 0;
  Timestamp stamp;
  RigidPose local_pose;
  Vec3 velocity = Vec3::Zero();
  double yaw_rate = 0.0;
  double pitch_rate = 0.0;
  /// Mean depth of tracked features (m), > 0.
  double feature_depth = 10.0;
};

struct CameraFov {
  double horizontal = 1.5;
  double vertical = 1.0;

  /// Throws ConfigError unless 0 < vertical <= horizontal < pi.
  void validate() const;
};

/// Number of pose nodes m_k in (previous, current]. Throws unless current > previous.
int epoch_length(Timestamp current, Timestamp previous);

/// Feature-persistence weight in [0, 3], averaged over the epoch's samples.
/// Only forward motion (+x) shortens feature lifetime along the optical axis,
/// and that term is squared.
double velocity_weight(std::span<const OdomSample> samples, double dt);

/// Field-of-view overlap weight in [0, 1], averaged over the epoch's samples.
double rotation_weight(std::span<const OdomSample> samples, const CameraFov& fov, double dt);

/// Agreement between world-frame inter-robot distances and the structure's
/// distances, summed over the pairs that contain `robot` and averaged over
/// the epoch steps. `world` holds one position vector per step.
double consistency_weight(std::span<const std::vector<Vec3>> world,
                          const Eigen::MatrixXd& structure_distances, int robot, double epsilon);

struct RawWeights {
  double velocity = 0.0;
  double rotation = 0.0;
  double consistency = 0.0;
};

struct RobotWeights {
  RawWeights raw;
  double velocity_hat = 0.0;
  double rotation_hat = 0.0;
  double consistency_hat = 0.0;
  double total = 0.0;
};

struct WeightSet {
  int epoch = 0;
  Timestamp stamp;
  std::vector<RobotWeights> robots;

  std::vector<double> totals() const;
};

/// Divides each weight type by its maximum over robots (all-zero types stay
/// zero) and sums the three normalized values per robot.
WeightSet normalize_and_total(std::span<const RawWeights> raw, int epoch = 0, Timestamp stamp = {});

/// Pairwise distance matrix of a point set.
Eigen::MatrixXd pairwise_distances(std::span<const Vec3> positions);

}  // namespace sawaml

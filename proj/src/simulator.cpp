#include "sawaml/simulator.hpp"

#include "sawaml/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sawaml {

// Polyline with circular fillets at the interior corners, parameterized by
// arc length.
struct TrajectoryModel::Path {
  struct Segment {
    bool arc = false;
    double length = 0.0;
    Vec3 start;
    Vec3 dir;     // line direction or arc entry tangent
    Vec3 normal;  // arc: unit vector from the entry point toward the centre
    double radius = 0.0;
  };

  std::vector<Segment> segments;
  double total = 0.0;
  bool closed = false;

  Vec3 at(double s) const {
    if (closed) {
      s = std::fmod(s, total);
      if (s < 0.0) s += total;
    } else {
      s = std::clamp(s, 0.0, total);
    }
    for (const auto& seg : segments) {
      if (s <= seg.length || &seg == &segments.back()) {
        const double u = std::min(s, seg.length);
        if (!seg.arc) return seg.start + u * seg.dir;
        const double phi = u / seg.radius;
        return seg.start + seg.radius * (seg.normal * (1.0 - std::cos(phi)) + seg.dir * std::sin(phi));
      }
      s -= seg.length;
    }
    return segments.back().start;
  }
};

namespace {

using Polyline = std::vector<Vec3>;

void add_line(std::vector<TrajectoryModel::Path::Segment>& out, const Vec3& a, const Vec3& b) {
  const double len = (b - a).norm();
  if (len < 1e-12) return;
  TrajectoryModel::Path::Segment s;
  s.length = len;
  s.start = a;
  s.dir = (b - a) / len;
  out.push_back(s);
}

// Builds lines and fillet arcs through `corners`. For closed paths the
// output starts at the exit of the first corner's fillet.
std::vector<TrajectoryModel::Path::Segment> fillet_path(const Polyline& corners, bool closed,
                                                        double radius) {
  const std::size_t n = corners.size();
  struct Corner {
    Vec3 entry, exit, in_dir, normal;
    double angle = 0.0;
  };
  std::vector<Corner> fillets(n);
  for (std::size_t k = 0; k < n; ++k) {
    fillets[k].entry = fillets[k].exit = corners[k];
    const bool interior = closed || (k > 0 && k + 1 < n);
    if (!interior || radius <= 0.0) continue;
    const Vec3 a = (corners[k] - corners[(k + n - 1) % n]).normalized();
    const Vec3 b = (corners[(k + 1) % n] - corners[k]).normalized();
    const double angle = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
    if (angle < 1e-9) continue;
    if (angle > std::numbers::pi - 1e-6) throw ConfigError("path reverses on itself");
    const double tangent = radius * std::tan(angle / 2.0);
    const double prev_len = (corners[k] - corners[(k + n - 1) % n]).norm();
    const double next_len = (corners[(k + 1) % n] - corners[k]).norm();
    if (tangent > 0.5 * prev_len + 1e-9 || tangent > 0.5 * next_len + 1e-9) {
      throw ConfigError("turn radius too large for the waypoint spacing");
    }
    auto& f = fillets[k];
    f.entry = corners[k] - tangent * a;
    f.exit = corners[k] + tangent * b;
    f.in_dir = a;
    f.normal = (b - a * a.dot(b)).normalized();
    f.angle = angle;
  }

  std::vector<TrajectoryModel::Path::Segment> out;
  auto add_arc = [&](const Corner& f) {
    if (f.angle <= 0.0) return;
    TrajectoryModel::Path::Segment s;
    s.arc = true;
    s.radius = radius;
    s.length = radius * f.angle;
    s.start = f.entry;
    s.dir = f.in_dir;
    s.normal = f.normal;
    out.push_back(s);
  };
  if (closed) {
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t next = (k + 1) % n;
      add_line(out, fillets[k].exit, fillets[next].entry);
      add_arc(fillets[next]);
    }
  } else {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      add_line(out, fillets[k].exit, fillets[k + 1].entry);
      add_arc(fillets[k + 1]);
    }
  }
  return out;
}

Polyline lawnmower_corners(const TrajectorySpec& t) {
  Polyline c;
  for (int lane = 0; lane < t.lanes; ++lane) {
    const double y = lane * t.lane_spacing;
    const bool forward = lane % 2 == 0;
    c.emplace_back(forward ? 0.0 : t.lane_length, y, 0.0);
    c.emplace_back(forward ? t.lane_length : 0.0, y, 0.0);
  }
  return c;
}

}  // namespace

TrajectoryModel::TrajectoryModel(const TrajectorySpec& spec) : spec_(spec) {
  if (spec.kind == TrajectoryKind::Lawnmower || spec.kind == TrajectoryKind::Waypoints) {
    Polyline corners;
    bool closed = true;
    if (spec.kind == TrajectoryKind::Lawnmower) {
      if (spec.lanes < 2) throw ConfigError("lawnmower needs at least 2 lanes");
      corners = lawnmower_corners(spec);
    } else {
      if (spec.waypoints.size() < 2) throw ConfigError("waypoint trajectory needs at least 2 points");
      corners = spec.waypoints;
      closed = spec.closed;
    }
    path_ = std::make_unique<Path>();
    path_->closed = closed;
    path_->segments = fillet_path(corners, closed, spec.turn_radius);
    if (path_->segments.empty()) throw ConfigError("trajectory path has zero length");
    for (const auto& s : path_->segments) path_->total += s.length;
  }
}

TrajectoryModel::~TrajectoryModel() = default;
TrajectoryModel::TrajectoryModel(TrajectoryModel&&) noexcept = default;
TrajectoryModel& TrajectoryModel::operator=(TrajectoryModel&&) noexcept = default;

Vec3 TrajectoryModel::position(double t) const {
  const auto& s = spec_;
  Vec3 p = s.origin;
  switch (s.kind) {
    case TrajectoryKind::Stationary:
      return p;
    case TrajectoryKind::Circle: {
      const double phi = s.phase + s.speed * t / s.radius;
      p += s.radius * Vec3(std::cos(phi), std::sin(phi), 0.0);
      break;
    }
    case TrajectoryKind::Lissajous:
      for (int a = 0; a < 3; ++a) p[a] += s.amplitude[a] * std::sin(s.frequency[a] * t + s.phases[a]);
      break;
    case TrajectoryKind::Lawnmower:
    case TrajectoryKind::Waypoints:
      p += path_->at(s.speed * t);
      break;
  }
  if (s.altitude_amplitude != 0.0) {
    p.z() += s.altitude_amplitude *
             std::sin(2.0 * std::numbers::pi * t / s.altitude_period + s.altitude_phase);
  }
  return p;
}

RigidPose TrajectoryModel::pose(double t) const {
  double yaw = spec_.yaw;
  if (spec_.kind != TrajectoryKind::Stationary) {
    constexpr double h = 1e-4;
    Vec3 v = position(t + h) - position(std::max(t - h, 0.0));
    // A robot parked at the end of an open path keeps its arrival heading.
    if (v.head<2>().norm() < 1e-12) v = position(t) - position(std::max(t - 1.0, 0.0));
    if (v.head<2>().norm() > 1e-12) yaw = std::atan2(v.y(), v.x());
  }
  return {Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix(), position(t)};
}

GroundTruth generate_ground_truth(const ScenarioConfig& config) {
  config.validate();
  const auto steps = config.steps();
  GroundTruth gt;
  for (const auto& robot : config.robots) {
    const TrajectoryModel model(robot.trajectory);
    Trajectory traj(config.dt);
    double length = 0.0;
    for (std::int64_t k = 0; k < steps; ++k) {
      const RigidPose p = model.pose(static_cast<double>(k) * config.dt);
      if (k > 0) length += (p.translation - traj.back().pose.translation).norm();
      traj.push_back(k, p);
    }
    gt.trajectories.push_back(std::move(traj));
    gt.path_lengths.push_back(length);
  }
  const int n = config.robot_count();
  for (std::int64_t k = 0; k < steps; ++k) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = (gt.trajectories[i][k].pose.translation -
                          gt.trajectories[j][k].pose.translation).norm();
        if (d < 1.0) {
          throw ConfigError("robots " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                            " come within 1 m at step " + std::to_string(k));
        }
      }
  }
  return gt;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

VioOutput simulate_vio(const Trajectory& gt, const VioNoise& params, std::uint64_t seed, int robot) {
  if (gt.empty()) throw PreconditionError("empty ground truth");
  auto rng = make_rng(seed, streams::kVioBase + static_cast<std::uint64_t>(robot));
  std::normal_distribution<double> unit(0.0, 1.0);
  const double dt = gt.dt();

  VioOutput out;
  out.trajectory = Trajectory(dt);
  RigidPose local = RigidPose::identity();
  out.trajectory.push_back(gt[0].stamp.step, local);

  auto make_sample = [&](std::size_t k, const RigidPose& increment, const RigidPose& pose) {
    OdomSample s;
    s.robot = robot;
    s.stamp = gt[k].stamp;
    s.local_pose = pose;
    s.velocity = increment.translation / dt;
    const Eigen::AngleAxisd aa(increment.rotation);
    const Vec3 omega = aa.angle() * aa.axis() / dt;
    s.yaw_rate = std::abs(omega.z());
    s.pitch_rate = std::abs(omega.y());
    s.feature_depth = params.depth_at(gt[k].stamp.seconds(dt));
    return s;
  };

  std::vector<RigidPose> increments;
  for (std::size_t k = 1; k < gt.size(); ++k) {
    const RigidPose inc = compose(inverse(gt[k - 1].pose), gt[k].pose);
    increments.push_back(inc);
    Vec3 dp = params.scale.cwiseProduct(inc.translation) + params.drift_rate * inc.translation;
    for (int a = 0; a < 3; ++a) dp[a] += params.sigma_p * unit(rng);
    Vec3 dtheta;
    for (int a = 0; a < 3; ++a) dtheta[a] = params.sigma_rot * std::sqrt(dt) * unit(rng);
    const RigidPose noisy(inc.rotation * so3_exp(dtheta), dp);
    local = renormalize(compose(local, noisy));
    out.trajectory.push_back(gt[k].stamp.step, local);
  }
  for (std::size_t k = 0; k < gt.size(); ++k) {
    const RigidPose inc = increments.empty() ? RigidPose::identity()
                                             : increments[k == 0 ? 0 : k - 1];
    out.samples.push_back(make_sample(k, inc, out.trajectory[k].pose));
  }
  return out;
}

double sample_range(double truth, const UwbParams& params, std::mt19937_64& rng, bool* nlos) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double d = truth + params.sigma * noise(rng);
  const bool outlier = uniform(rng) < params.p_nlos;
  if (outlier) d += params.bias_min + (params.bias_max - params.bias_min) * uniform(rng);
  if (nlos) *nlos = outlier;
  return std::max(d, 0.0);
}

std::vector<RawRange> simulate_uwb(std::span<const Trajectory> gt, const UwbParams& params,
                                   std::uint64_t seed) {
  if (gt.empty()) return {};
  auto rng = make_rng(seed, streams::kUwb);
  const int n = static_cast<int>(gt.size());
  const int q = params.samples_per_step;
  const std::size_t steps = gt.front().size();
  for (const auto& t : gt) {
    if (t.size() != steps) throw PreconditionError("ground-truth trajectories differ in length");
  }

  std::vector<RawRange> out;
  out.reserve(steps * q * n * (n - 1) / 2);
  std::vector<Vec3> pos(n);
  for (std::size_t s = 0; s < steps; ++s) {
    for (int u = 0; u < q; ++u) {
      // Fraction of a step before the current node; clamped at the start.
      const double back = static_cast<double>(q - 1 - u) / q;
      for (int i = 0; i < n; ++i) {
        const Vec3& cur = gt[i][s].pose.translation;
        if (s == 0 || back == 0.0) {
          pos[i] = cur;
        } else {
          const Vec3& prev = gt[i][s - 1].pose.translation;
          pos[i] = cur + back * (prev - cur);
        }
      }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          RawRange r;
          r.i = i;
          r.j = j;
          r.step = gt[i][s].stamp.step;
          r.distance = sample_range((pos[i] - pos[j]).norm(), params, rng);
          out.push_back(r);
        }
    }
  }
  return out;
}

}  // namespace sawaml

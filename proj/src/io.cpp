#include "sawaml/io.hpp"

#include "sawaml/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sawaml::io {
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Splits the data rows of a CSV with the given header.
std::vector<std::vector<std::string>> read_rows(const fs::path& path, const std::string& header,
                                                std::size_t columns) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error("'" + path.string() + "' does not start with header '" + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != columns) {
      throw Error(path.string() + ":" + std::to_string(number) + ": expected " +
                  std::to_string(columns) + " fields");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error("bad number '" + s + "'");
  }
  if (used != s.size()) throw Error("bad number '" + s + "'");
  return v;
}

std::int64_t to_int(const std::string& s) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw Error("bad integer '" + s + "'");
  }
  if (used != s.size()) throw Error("bad integer '" + s + "'");
  return v;
}

constexpr const char* kTrajectoryHeader = "step,t,x,y,z,qw,qx,qy,qz";
constexpr const char* kRangeHeader = "step,i,j,distance";
constexpr const char* kOdomHeader = "step,vx,vy,vz,yaw_rate,pitch_rate,depth";

}  // namespace

fs::path numbered(const fs::path& dir, const std::string& prefix, int id) {
  return dir / (prefix + "_" + std::to_string(id) + ".csv");
}

void write_trajectory(const fs::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << kTrajectoryHeader << '\n';
  for (const auto& p : traj) {
    const auto q = p.pose.quaternion();
    const Vec3& t = p.pose.translation;
    out << p.stamp.step << ',' << g17(p.stamp.seconds(traj.dt())) << ',' << g17(t.x()) << ','
        << g17(t.y()) << ',' << g17(t.z()) << ',' << g17(q.w()) << ',' << g17(q.x()) << ','
        << g17(q.y()) << ',' << g17(q.z()) << '\n';
  }
}

Trajectory read_trajectory(const fs::path& path) {
  const auto rows = read_rows(path, kTrajectoryHeader, 9);
  if (rows.empty()) throw Error("'" + path.string() + "' has no poses");
  double dt = 0.1;
  for (const auto& r : rows) {
    const auto step = to_int(r[0]);
    if (step > 0) {
      dt = to_double(r[1]) / static_cast<double>(step);
      break;
    }
  }
  Trajectory traj(dt);
  for (const auto& r : rows) {
    const Eigen::Quaterniond q(to_double(r[5]), to_double(r[6]), to_double(r[7]), to_double(r[8]));
    if (q.norm() < 1e-9) throw Error("zero quaternion in '" + path.string() + "'");
    const Vec3 t(to_double(r[2]), to_double(r[3]), to_double(r[4]));
    try {
      traj.push_back(to_int(r[0]), RigidPose::from_quaternion(q.normalized(), t));
    } catch (const PreconditionError& e) {
      throw Error("'" + path.string() + "': " + e.what());
    }
  }
  return traj;
}

void write_ranges(const fs::path& path, std::span<const RawRange> ranges) {
  auto out = open_out(path);
  out << kRangeHeader << '\n';
  for (const auto& r : ranges) {
    out << r.step << ',' << r.i + 1 << ',' << r.j + 1 << ',' << g17(r.distance) << '\n';
  }
}

std::vector<RawRange> read_ranges(const fs::path& path) {
  std::vector<RawRange> out;
  for (const auto& row : read_rows(path, kRangeHeader, 4)) {
    RawRange r;
    r.step = to_int(row[0]);
    r.i = static_cast<int>(to_int(row[1])) - 1;
    r.j = static_cast<int>(to_int(row[2])) - 1;
    r.distance = to_double(row[3]);
    if (r.i < 0 || r.j < 0 || r.i == r.j) throw Error("bad robot pair in '" + path.string() + "'");
    if (!(r.distance >= 0.0)) throw Error("negative range in '" + path.string() + "'");
    if (r.i > r.j) std::swap(r.i, r.j);
    if (!out.empty() && r.step < out.back().step) {
      throw Error("'" + path.string() + "' is not ordered by step");
    }
    out.push_back(r);
  }
  return out;
}

void write_odometry(const fs::path& path, std::span<const OdomSample> samples) {
  auto out = open_out(path);
  out << kOdomHeader << '\n';
  for (const auto& s : samples) {
    out << s.stamp.step << ',' << g17(s.velocity.x()) << ',' << g17(s.velocity.y()) << ','
        << g17(s.velocity.z()) << ',' << g17(s.yaw_rate) << ',' << g17(s.pitch_rate) << ','
        << g17(s.feature_depth) << '\n';
  }
}

std::vector<OdomSample> read_odometry(const fs::path& path, const Trajectory& vio, int robot) {
  const auto rows = read_rows(path, kOdomHeader, 7);
  if (rows.size() != vio.size()) {
    throw Error("'" + path.string() + "' and its VIO trajectory differ in length");
  }
  std::vector<OdomSample> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    OdomSample s;
    s.robot = robot;
    s.stamp = {to_int(r[0])};
    if (s.stamp != vio[k].stamp) throw Error("'" + path.string() + "' steps do not match its VIO");
    s.local_pose = vio[k].pose;
    s.velocity = {to_double(r[1]), to_double(r[2]), to_double(r[3])};
    s.yaw_rate = std::abs(to_double(r[4]));
    s.pitch_rate = std::abs(to_double(r[5]));
    s.feature_depth = to_double(r[6]);
    if (!(s.feature_depth > 0.0)) throw Error("non-positive feature depth in '" + path.string() + "'");
    out.push_back(s);
  }
  return out;
}

void write_anchors(const fs::path& path, std::span<const AnchorNodeSet> anchors, double dt) {
  auto out = open_out(path);
  out << "epoch,step,t,robot,x,y,z,mirrored,cost,cost_rejected\n";
  for (const auto& a : anchors) {
    const int chosen = a.mirrored ? 1 : 0;
    for (std::size_t i = 0; i < a.positions.size(); ++i) {
      const Vec3& p = a.positions[i];
      out << a.epoch << ',' << a.stamp.step << ',' << g17(a.stamp.seconds(dt)) << ',' << i + 1
          << ',' << g17(p.x()) << ',' << g17(p.y()) << ',' << g17(p.z()) << ',' << chosen << ','
          << g17(a.costs[chosen]) << ',' << g17(a.costs[1 - chosen]) << '\n';
    }
  }
}

void write_weights(const fs::path& path, std::span<const WeightSet> weights) {
  auto out = open_out(path);
  out << "epoch,step,robot,w_v,w_a,w_r,w_v_hat,w_a_hat,w_r_hat,w\n";
  for (const auto& set : weights) {
    for (std::size_t i = 0; i < set.robots.size(); ++i) {
      const auto& r = set.robots[i];
      out << set.epoch << ',' << set.stamp.step << ',' << i + 1 << ',' << g17(r.raw.velocity) << ','
          << g17(r.raw.rotation) << ',' << g17(r.raw.consistency) << ',' << g17(r.velocity_hat)
          << ',' << g17(r.rotation_hat) << ',' << g17(r.consistency_hat) << ',' << g17(r.total)
          << '\n';
    }
  }
}

void write_scales(const fs::path& path, std::span<const ScaleRecord> scales) {
  auto out = open_out(path);
  out << "epoch,step,robot,sx,sy,sz\n";
  for (const auto& rec : scales) {
    for (std::size_t i = 0; i < rec.states.size(); ++i) {
      const Vec3& f = rec.states[i].factors;
      out << rec.epoch << ',' << rec.stamp.step << ',' << i + 1 << ',' << g17(f.x()) << ','
          << g17(f.y()) << ',' << g17(f.z()) << '\n';
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<Trajectory> read_numbered_trajectories(const fs::path& dir, const std::string& prefix) {
  std::vector<Trajectory> out;
  for (int id = 1; fs::exists(numbered(dir, prefix, id)); ++id) {
    out.push_back(read_trajectory(numbered(dir, prefix, id)));
  }
  return out;
}

void write_run(const fs::path& dir, const SimulatedRun& run) {
  fs::create_directories(dir);
  const int n = run.config.robot_count();
  for (int i = 0; i < n; ++i) {
    write_trajectory(numbered(dir, "gt", i + 1), run.gt.trajectories[i]);
    write_trajectory(numbered(dir, "vio", i + 1), run.vio[i].trajectory);
    write_odometry(numbered(dir, "odom", i + 1), run.vio[i].samples);
    write_trajectory(numbered(dir, "global", i + 1), run.output.global[i]);
    write_trajectory(numbered(dir, "corrected", i + 1), run.output.corrected[i]);
  }
  write_ranges(dir / "ranges.csv", run.raw_ranges);
  write_anchors(dir / "anchors.csv", run.output.anchors, run.config.dt);
  write_weights(dir / "weights.csv", run.output.weights);
  write_scales(dir / "scales.csv", run.output.scales);
}

}  // namespace sawaml::io

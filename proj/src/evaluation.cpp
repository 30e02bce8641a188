#include "sawaml/evaluation.hpp"

#include "sawaml/alignment.hpp"
#include "sawaml/error.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace sawaml {
namespace {

void check_grids(const Trajectory& est, const Trajectory& gt) {
  if (est.empty() || gt.empty()) throw PreconditionError("empty trajectory");
  if (est.size() != gt.size()) throw PreconditionError("trajectories are on different step grids");
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (est[k].stamp != gt[k].stamp) throw PreconditionError("trajectories are on different step grids");
  }
}

Trajectory transformed(const Trajectory& est, const RigidPose& t) {
  Trajectory out(est.dt());
  for (const auto& p : est) out.push_back(p.stamp.step, renormalize(compose(t, p.pose)));
  return out;
}

}  // namespace

Trajectory align_initial(const Trajectory& est, const Trajectory& gt) {
  check_grids(est, gt);
  return transformed(est, compose(gt.front().pose, inverse(est.front().pose)));
}

Trajectory align_full(const Trajectory& est, const Trajectory& gt) {
  check_grids(est, gt);
  const auto world = gt.positions();
  const auto points = est.positions();
  const std::vector<double> weights(points.size(), 1.0);
  return transformed(est, weighted_align(world, points, weights).transform);
}

Trajectory align(const Trajectory& est, const Trajectory& gt, AlignMode mode) {
  return mode == AlignMode::Initial ? align_initial(est, gt) : align_full(est, gt);
}

double ate_rmse(const Trajectory& est, const Trajectory& gt) {
  check_grids(est, gt);
  double sum = 0.0;
  for (std::size_t k = 0; k < est.size(); ++k) {
    sum += (est[k].pose.translation - gt[k].pose.translation).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(est.size()));
}

double trajectory_length(const Trajectory& traj) {
  if (traj.empty()) throw PreconditionError("empty trajectory");
  double length = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    length += (traj[k].pose.translation - traj[k - 1].pose.translation).norm();
  }
  return length;
}

AteReport make_report(std::span<const Trajectory> gt, std::span<const Trajectory> vio,
                      std::span<const Trajectory> corrected, std::span<const Trajectory> global,
                      AlignMode mode) {
  const std::size_t n = gt.size();
  if (vio.size() != n || corrected.size() != n || global.size() != n || n == 0) {
    throw PreconditionError("report inputs differ in robot count");
  }
  AteReport report;
  report.alignment = mode;
  for (std::size_t i = 0; i < n; ++i) {
    RobotAte r;
    r.id = static_cast<int>(i) + 1;
    r.length_m = trajectory_length(gt[i]);
    r.ate_vio = ate_rmse(align(vio[i], gt[i], mode), gt[i]);
    r.ate_corrected = ate_rmse(align(corrected[i], gt[i], mode), gt[i]);
    r.ate_global = ate_rmse(align(global[i], gt[i], mode), gt[i]);
    report.per_robot.push_back(r);
  }
  for (const auto& r : report.per_robot) {
    report.avg.length_m += r.length_m / n;
    report.avg.ate_vio += r.ate_vio / n;
    report.avg.ate_corrected += r.ate_corrected / n;
    report.avg.ate_global += r.ate_global / n;
  }
  return report;
}

std::string AteReport::to_json() const {
  using nlohmann::ordered_json;
  auto row = [](const RobotAte& r) {
    return ordered_json{{"length_m", r.length_m},
                        {"ate_vio", r.ate_vio},
                        {"ate_corrected", r.ate_corrected},
                        {"ate_global", r.ate_global}};
  };
  ordered_json j;
  j["schema_version"] = schema_version;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["alignment"] = alignment == AlignMode::Initial ? "initial" : "full";
  j["per_robot"] = ordered_json::array();
  for (const auto& r : per_robot) {
    ordered_json e{{"id", r.id}};
    e.update(row(r));
    j["per_robot"].push_back(e);
  }
  j["avg"] = row(avg);
  return j.dump(2) + "\n";
}

std::string AteReport::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %10s %10s %14s %11s\n", "robot", "length_m", "ate_vio",
                "ate_corrected", "ate_global");
  out << line;
  auto emit = [&](const std::string& label, const RobotAte& r) {
    std::snprintf(line, sizeof line, "%-6s %10.2f %10.3f %14.3f %11.3f\n", label.c_str(), r.length_m,
                  r.ate_vio, r.ate_corrected, r.ate_global);
    out << line;
  };
  for (const auto& r : per_robot) emit(std::to_string(r.id), r);
  emit("avg", avg);
  if (alignment == AlignMode::Full) out << "(full-trajectory alignment, diagnostic)\n";
  return out.str();
}

}  // namespace sawaml

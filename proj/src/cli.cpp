#include "sawaml/cli.hpp"

#include "sawaml/error.hpp"
#include "sawaml/evaluation.hpp"
#include "sawaml/io.hpp"
#include "sawaml/pipeline.hpp"
#include "sawaml/scenario.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace sawaml {
namespace fs = std::filesystem;

namespace {

AteReport report_for(const SimulatedRun& run) {
  std::vector<Trajectory> vio;
  for (const auto& v : run.vio) vio.push_back(v.trajectory);
  AteReport report = make_report(run.gt.trajectories, vio, run.output.corrected, run.output.global);
  report.scenario = run.config.name;
  report.seed = run.config.seed;
  return report;
}

int simulate(const std::string& config_path, const std::string& out_dir,
             const std::optional<std::uint64_t>& seed, std::ostream& out) {
  ScenarioConfig config = load_scenario(config_path);
  if (seed) config.seed = *seed;
  const SimulatedRun run = run_pipeline(config);
  io::write_run(out_dir, run);
  io::write_text(fs::path(out_dir) / "config.yaml", scenario_to_yaml(config));
  const AteReport report = report_for(run);
  io::write_text(fs::path(out_dir) / "metrics.json", report.to_json());
  out << "scenario " << config.name << ", seed " << config.seed << ", "
      << run.output.anchors.size() << " anchor epochs\n"
      << report.to_table();
  return 0;
}

int evaluate(const std::string& dir, const std::string& align_mode, std::ostream& out) {
  const AlignMode mode = align_mode == "full" ? AlignMode::Full : AlignMode::Initial;
  const auto gt = io::read_numbered_trajectories(dir, "gt");
  if (gt.empty()) throw Error("no gt_<id>.csv files in '" + dir + "'");
  const auto vio = io::read_numbered_trajectories(dir, "vio");
  const auto corrected = io::read_numbered_trajectories(dir, "corrected");
  const auto global = io::read_numbered_trajectories(dir, "global");
  AteReport report = make_report(gt, vio, corrected, global, mode);
  const fs::path config_path = fs::path(dir) / "config.yaml";
  if (fs::exists(config_path)) {
    const ScenarioConfig config = load_scenario(config_path.string());
    report.scenario = config.name;
    report.seed = config.seed;
  }
  const char* name = mode == AlignMode::Initial ? "metrics.json" : "metrics_full.json";
  io::write_text(fs::path(dir) / name, report.to_json());
  out << report.to_table();
  return 0;
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> values;
  std::stringstream ss(list);
  for (std::string v; std::getline(ss, v, ',');) {
    if (!v.empty()) values.push_back(v);
  }
  return values;
}

int sweep(const std::string& config_path, const std::string& param,
          const std::optional<std::uint64_t>& seed, const std::string& out_dir, std::ostream& out) {
  const auto eq = param.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects <path>=<v1,v2,...>");
  const std::string path = param.substr(0, eq);
  const auto values = split_values(param.substr(eq + 1));
  if (values.empty()) throw ConfigError("--param lists no values");
  const std::string text = io::read_text(config_path);

  nlohmann::ordered_json summary;
  summary["schema_version"] = kMetricsSchemaVersion;
  summary["parameter"] = path;
  summary["runs"] = nlohmann::ordered_json::array();
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %10s %14s %11s\n", path.c_str(), "ate_vio", "ate_corrected",
                "ate_global");
  out << line;
  for (const auto& value : values) {
    ScenarioConfig config = parse_scenario(text, {{path, value}});
    if (seed) config.seed = *seed;
    const SimulatedRun run = run_pipeline(config);
    const AteReport report = report_for(run);
    std::snprintf(line, sizeof line, "%-16s %10.3f %14.3f %11.3f\n", value.c_str(),
                  report.avg.ate_vio, report.avg.ate_corrected, report.avg.ate_global);
    out << line;
    summary["runs"].push_back({{"value", value},
                               {"seed", config.seed},
                               {"metrics", nlohmann::ordered_json::parse(report.to_json())}});
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    io::write_text(fs::path(out_dir) / "sweep.json", summary.dump(2) + "\n");
  }
  return 0;
}

int replay(const std::string& ranges_path, const std::string& odom_dir, const std::string& config_path,
           const std::string& gt_dir, const std::string& out_dir, std::ostream& out) {
  const ScenarioConfig config =
      config_path.empty() ? preset_scenario("default") : load_scenario(config_path);

  PipelineInput input;
  input.vio = io::read_numbered_trajectories(odom_dir, "vio");
  if (input.vio.size() < 4) throw Error("replay needs vio_<id>.csv for at least 4 robots");
  input.dt = input.vio.front().dt();
  for (std::size_t i = 0; i < input.vio.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    input.odom.push_back(io::read_odometry(io::numbered(odom_dir, "odom", id), input.vio[i],
                                           static_cast<int>(i)));
  }
  input.ranges = io::read_ranges(ranges_path);
  for (const auto& r : input.ranges) {
    if (r.j >= static_cast<int>(input.vio.size())) throw Error("range log names an unknown robot");
  }
  input.params = config.pipeline;
  input.zeta = input.params.zeta ? *input.params.zeta : default_zeta(static_cast<int>(input.vio.size()));
  input.seed = make_rng(config.seed, streams::kRansac)();

  std::vector<Trajectory> gt;
  if (!gt_dir.empty()) {
    gt = io::read_numbered_trajectories(gt_dir, "gt");
    if (gt.size() != input.vio.size()) throw Error("ground truth and VIO robot counts differ");
  }
  input.mode = gt.empty() ? InitialPoseMode::Unknown : config.initial_mode;
  for (const auto& g : gt) input.gt_initial.push_back(g.front().pose);

  const PipelineOutput result = run_localization(input);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < input.vio.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    io::write_trajectory(io::numbered(out_dir, "global", id), result.global[i]);
    io::write_trajectory(io::numbered(out_dir, "corrected", id), result.corrected[i]);
  }
  io::write_anchors(fs::path(out_dir) / "anchors.csv", result.anchors, input.dt);
  io::write_weights(fs::path(out_dir) / "weights.csv", result.weights);
  io::write_scales(fs::path(out_dir) / "scales.csv", result.scales);
  out << input.vio.size() << " robots, " << input.vio.front().size() << " steps, "
      << result.anchors.size() << " anchor epochs\n";
  if (!gt.empty()) {
    AteReport report = make_report(gt, input.vio, result.corrected, result.global);
    report.scenario = config.name;
    report.seed = config.seed;
    io::write_text(fs::path(out_dir) / "metrics.json", report.to_json());
    out << report.to_table();
  }
  return 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-robot visual-inertial-range localization toolkit", "sawaml"};
  app.require_subcommand(1);

  std::string config_path, out_dir, dir, align_mode = "initial", param, ranges_path, odom_dir,
                                         gt_dir;
  std::uint64_t seed_value = 0;

  auto* sim = app.add_subcommand("simulate", "Simulate a scenario and run the pipeline");
  sim->add_option("config", config_path, "Scenario YAML file")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  auto* sim_seed = sim->add_option("--seed", seed_value, "Override the scenario seed");

  auto* eval = app.add_subcommand("evaluate", "Compute ATE metrics for a run directory");
  eval->add_option("dir", dir, "Run directory")->required();
  eval->add_option("--align", align_mode, "Alignment: initial (default) or full")
      ->check(CLI::IsMember({"initial", "full"}));

  auto* sw = app.add_subcommand("sweep", "Run a scenario over a grid of one parameter");
  sw->add_option("config", config_path, "Scenario YAML file")->required();
  sw->add_option("--param", param, "<dotted.path>=<v1,v2,...>")->required();
  auto* sw_seed = sw->add_option("--seed", seed_value, "Override the scenario seed");
  sw->add_option("--out", out_dir, "Directory for sweep.json");

  auto* rp = app.add_subcommand("replay", "Run the pipeline on recorded logs");
  rp->add_option("ranges", ranges_path, "Raw range CSV")->required();
  rp->add_option("odom_dir", odom_dir, "Directory with vio_<id>.csv and odom_<id>.csv")->required();
  rp->add_option("--config", config_path, "Scenario YAML with pipeline parameters");
  rp->add_option("--gt-dir", gt_dir, "Directory with gt_<id>.csv for known initials and metrics");
  rp->add_option("--out", out_dir, "Output directory")->default_val("replay_out");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::optional<std::uint64_t> seed;
  if (sim_seed->count() > 0 || sw_seed->count() > 0) seed = seed_value;
  try {
    if (*sim) return simulate(config_path, out_dir, seed, out);
    if (*eval) return evaluate(dir, align_mode, out);
    if (*sw) return sweep(config_path, param, seed, out_dir, out);
    if (*rp) return replay(ranges_path, odom_dir, config_path, gt_dir, out_dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace sawaml

#include "doctest.h"

#include "sawaml/cli.hpp"
#include "sawaml/io.hpp"
#include "support/temp_dir.hpp"

#include "json.hpp"

#include <cstdlib>
#include <sstream>

using namespace sawaml;
using namespace sawaml::testing;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) {
  const char* dir = std::getenv("SAWAML_CONFIG_DIR");
  return std::string(dir ? dir : "configs") + "/" + name;
}

}  // namespace

TEST_CASE("help and argument errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--help"}).out.find("simulate") != std::string::npos);
  CHECK(run({}).code != 0);
  const auto bad = run({"simulate", config("default.yaml"), "--out", "x", "--bogus"});
  CHECK(bad.code != 0);
  CHECK_FALSE(bad.err.empty());
  CHECK(run({"frobnicate"}).code != 0);
  CHECK(run({"evaluate", "/nonexistent", "--align", "sideways"}).code != 0);
}

TEST_CASE("missing inputs exit nonzero") {
  TempDir dir("cli");
  const auto r = run({"simulate", "missing.cfg", "--out", (dir / "run").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("missing.cfg") != std::string::npos);
  CHECK(run({"evaluate", (dir / "empty").string()}).code != 0);
  CHECK(run({"replay", (dir / "ranges.csv").string(), dir.path().string()}).code != 0);
}

TEST_CASE("simulate is deterministic and evaluate reproduces its metrics") {
  TempDir dir("cli");
  const auto a = (dir / "a").string(), b = (dir / "b").string();
  const auto ra = run({"simulate", config("robot4_scale_error.yaml"), "--out", a, "--seed", "7"});
  REQUIRE(ra.code == 0);
  REQUIRE(run({"simulate", config("robot4_scale_error.yaml"), "--out", b, "--seed", "7"}).code == 0);
  const auto ma = io::read_text(a + "/metrics.json");
  CHECK(ma == io::read_text(b + "/metrics.json"));
  CHECK(ra.out.find("seed 7") != std::string::npos);

  const auto j = nlohmann::json::parse(ma);
  CHECK(j["seed"] == 7);
  CHECK(j["scenario"] == "robot4_scale_error");
  for (const auto& r : j["per_robot"]) {
    CHECK(r["ate_corrected"].get<double>() <= r["ate_vio"].get<double>());
  }

  REQUIRE(run({"evaluate", a}).code == 0);
  CHECK(io::read_text(a + "/metrics.json") == ma);
  REQUIRE(run({"evaluate", a, "--align", "full"}).code == 0);
  const auto full = nlohmann::json::parse(io::read_text(a + "/metrics_full.json"));
  CHECK(full["alignment"] == "full");

  for (const char* f : {"gt_1.csv", "vio_5.csv", "corrected_4.csv", "global_2.csv", "odom_3.csv",
                        "ranges.csv", "anchors.csv", "weights.csv", "scales.csv", "config.yaml"}) {
    CHECK(std::filesystem::exists(std::filesystem::path(a) / f));
  }

  // Replaying the recorded logs with the same settings reproduces the run.
  const auto out = (dir / "replay").string();
  REQUIRE(run({"replay", a + "/ranges.csv", a, "--config", a + "/config.yaml", "--gt-dir", a, "--out",
               out})
              .code == 0);
  const auto rj = nlohmann::json::parse(io::read_text(out + "/metrics.json"));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(rj["per_robot"][i]["ate_vio"].get<double>() ==
          doctest::Approx(j["per_robot"][i]["ate_vio"].get<double>()).epsilon(1e-9));
  }
}

TEST_CASE("sweep runs one pipeline per value") {
  TempDir dir("cli");
  const auto r = run({"sweep", config("default.yaml"), "--param", "duration=30,40", "--out",
                      dir.path().string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(io::read_text(dir / "sweep.json"));
  REQUIRE(j["runs"].size() == 2);
  CHECK(j["runs"][1]["value"] == "40");
  CHECK(j["parameter"] == "duration");
  CHECK(run({"sweep", config("default.yaml"), "--param", "duration"}).code != 0);
  CHECK(run({"sweep", config("default.yaml"), "--param", "uwb.sigma=-1"}).code != 0);
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kData = SAFE_FIELD_DATA_DIR;

int run(const std::string& args) {
  const std::string cmd = std::string(SAFE_FIELD_CLI) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("safe_field_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(Cli, MissingEnvironmentIsConfigError) {
  const fs::path d = fresh_dir("missing");
  auto cfg = nlohmann::json::parse(slurp(kData + "/patrol.json"));
  cfg["environment"] = (d / "nowhere.json").string();
  write(d / "cfg.json", cfg.dump());
  EXPECT_EQ(run("synth --config " + (d / "cfg.json").string() + " --out " + d.string()), 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("synth"), 2);
  EXPECT_EQ(run("launch --config x.json"), 2);
  EXPECT_EQ(run("simulate --config " + kData + "/patrol.json --sensor lidar"), 2);
  // verify before synth has no controllers to read.
  const fs::path d = fresh_dir("nosynth");
  EXPECT_EQ(run("verify --config " + kData + "/patrol.json --out " + d.string()), 2);
}

TEST(Cli, TamperedGainsFailVerification) {
  const fs::path d = fresh_dir("tamper");
  const std::string base = "--config " + kData + "/patrol.json --out " + d.string();
  ASSERT_EQ(run("synth " + base), 0);
  ASSERT_EQ(run("verify " + base), 0);
  auto j = nlohmann::ordered_json::parse(slurp(d / "controllers.json"));
  auto& kb = j["controllers"][0]["K_b"];
  kb[1] = kb[1].get<double>() - 0.1;
  write(d / "controllers.json", j.dump(2));
  EXPECT_EQ(run("verify " + base), 1);
  const auto rep = nlohmann::json::parse(slurp(d / "report.json"));
  EXPECT_EQ(rep["pass"], false);
}

TEST(Cli, InfeasibleCellIsSolverExit) {
  const fs::path d = fresh_dir("infeasible");
  write(d / "env.json", R"({
    "dimension": 2,
    "landmarks": [[0.06, 0.01], [0.18, 0.01]],
    "cells": [
      {"id": 0, "vertices": [[0, 0], [0.12, 0.006], [0.12, 0.014], [0, 0.02]], "landmark_ids": [0]},
      {"id": 1, "vertices": [[0.12, 0.006], [0.24, 0.006], [0.24, 0.014], [0.12, 0.014]], "landmark_ids": [1]}
    ],
    "start": [0.03, 0.01],
    "goal": [0.24, 0.014]
  })");
  auto cfg = nlohmann::json::parse(slurp(kData + "/patrol.json"));
  cfg["environment"] = "env.json";
  cfg["mode"] = "stabilize";
  write(d / "cfg.json", cfg.dump());
  EXPECT_EQ(run("synth --config " + (d / "cfg.json").string() + " --out " + d.string() +
                " --cells 0"),
            3);
}

TEST(Cli, CellSubsetAndOverrides) {
  const fs::path d = fresh_dir("subset");
  ASSERT_EQ(run("synth --config " + kData + "/patrol.json --out " + d.string() +
                " --cells 1 --eps 2 --sigma 9"),
            0);
  const auto j = nlohmann::json::parse(slurp(d / "controllers.json"));
  ASSERT_EQ(j["controllers"].size(), 1u);
  EXPECT_EQ(j["controllers"][0]["id"], 1);
  EXPECT_NEAR(j["controllers"][0]["epsilon"].get<double>(), 0.02, 1e-12);
  EXPECT_NEAR(j["controllers"][0]["sigma_m"].get<double>(), 0.09, 1e-12);
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path a = fresh_dir("rerun_a"), b = fresh_dir("rerun_b");
  for (const auto& d : {a, b}) {
    const std::string base = "--config " + kData + "/patrol.json --out " + d.string();
    ASSERT_EQ(run("pipeline " + base), 0);
    ASSERT_EQ(run("simulate --sensor gaussian " + base), 0);
    ASSERT_EQ(run("field --sensor gaussian " + base), 0);
  }
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 8);
  EXPECT_TRUE(fs::exists(a / "trajectory_gaussian_0.csv"));
  EXPECT_TRUE(fs::exists(a / "field_cell0_delta.csv"));
  EXPECT_TRUE(fs::exists(a / "simulation_delta.json"));
}

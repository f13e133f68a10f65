#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "safe_field/simulation.hpp"
#include "safe_field/verification.hpp"

namespace safe_field::config {

struct RunConfig {
  std::filesystem::path env_path;
  geometry::Environment env;
  planning::Mode mode = planning::Mode::Stabilize;
  synthesis::SynthesisConfig synth;
  simulation::SimConfig sim;
  // Sensor used when --sensor gaussian is requested.
  simulation::SensorModel gaussian;
  std::vector<Eigen::VectorXd> starts;
  int field_resolution = 15;
  std::vector<int> field_cells;
  verification::SamplingConfig sampling;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;
  // epsilon, sigma_m, drift and variance are given in grid pitches.
  bool bounds_in_pitch = false;
};

geometry::Environment environment_from_json(const nlohmann::json& j);
geometry::Environment load_environment(const std::filesystem::path& path);

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Applies epsilon / sigma_m overrides given in the config's units.
void override_bounds(RunConfig& c, std::optional<double> epsilon, std::optional<double> sigma_m);

}  // namespace safe_field::config

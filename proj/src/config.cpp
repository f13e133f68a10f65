#include "safe_field/config.hpp"

#include <fstream>

namespace safe_field::config {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Eigen::VectorXd to_vec(const json& a, const std::string& field) {
  if (!a.is_array()) fail(ErrorKind::ConfigError, "field '" + field + "' must be an array");
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) fail(ErrorKind::ConfigError, "field '" + field + "' must hold numbers");
    v(i) = a[i].get<double>();
  }
  return v;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
}

double positive(const json& j, const char* key, double def) {
  const double v = j.value(key, def);
  if (!(v > 0)) fail(ErrorKind::ConfigError, std::string("field '") + key + "' must be positive");
  return v;
}

}  // namespace

geometry::Environment environment_from_json(const json& j) {
  try {
    geometry::Environment env;
    env.dimension = j.value("dimension", 2);
    for (const auto& l : j.at("landmarks")) env.landmarks.push_back(to_vec(l, "landmarks"));
    int next_id = 0;
    for (const auto& c : j.at("cells")) {
      std::vector<Eigen::VectorXd> verts;
      for (const auto& v : c.at("vertices")) verts.push_back(to_vec(v, "cells.vertices"));
      const int id = c.value("id", next_id);
      next_id = id + 1;
      env.cells.push_back(
          geometry::make_cell(id, verts, c.at("landmark_ids").get<std::vector<int>>()));
    }
    env.start = to_vec(j.at("start"), "start");
    env.goal = to_vec(j.at("goal"), "goal");
    if (j.contains("goal_cell")) env.goal_cell = j.at("goal_cell").get<int>();
    if (j.contains("patrol_cycle")) env.patrol_cycle = j.at("patrol_cycle").get<std::vector<int>>();
    geometry::validate_environment(env);
    return env;
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigError, std::string("environment: ") + e.what());
  }
}

geometry::Environment load_environment(const fs::path& path) {
  return environment_from_json(read_json(path));
}

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  RunConfig c;
  try {
    if (!j.contains("environment")) fail(ErrorKind::ConfigError, "missing field 'environment'");
    c.env_path = base_dir / j.at("environment").get<std::string>();
    c.env = load_environment(c.env_path);
    const std::string mode = j.value("mode", "stabilize");
    if (mode == "stabilize") c.mode = planning::Mode::Stabilize;
    else if (mode == "patrol") c.mode = planning::Mode::Patrol;
    else fail(ErrorKind::ConfigError, "field 'mode' must be stabilize or patrol");

    auto& s = c.synth;
    s.alpha_v = positive(j, "alpha_v", 1.0);
    s.alpha_h = positive(j, "alpha_h", 100.0);
    const json g = j.value("grid", json::object());
    const int n = g.value("n", 30);
    const double w = g.value("width", 30.0);
    if (n < 1 || !(w > 0)) fail(ErrorKind::ConfigError, "field 'grid' needs positive n and width");
    s.grid = measurement::make_grid(n, w, c.env.dimension);
    c.bounds_in_pitch = j.value("bounds_in_pitch", false);
    const double pitch = c.bounds_in_pitch ? s.grid.pitch(0) : 1.0;
    s.bounds.epsilon = j.value("epsilon", 4.0) * pitch;
    s.bounds.sigma_m = j.value("sigma_m", 16.0) * pitch;
    if (s.bounds.epsilon < 0 || s.bounds.sigma_m < 0) {
      fail(ErrorKind::ConfigError, "fields 'epsilon' and 'sigma_m' must be non-negative");
    }
    s.basis_names = j.value("basis", std::vector<std::string>{"mean", "quadratic", "cosine"});
    const json om = j.value("omega", json::object());
    s.omega_clf = om.value("clf", 1.0);
    s.omega_cbf = om.value("cbf", 1.0);
    if (j.contains("u_max")) s.u_max = positive(j, "u_max", 1.0);
    s.goal_constraint = j.value("goal_constraint", true);
    s.dynamics = clfcbf::single_integrator(c.env.dimension);

    const json sim = j.value("sim", json::object());
    c.sim.dt = positive(sim, "dt", 0.01);
    c.sim.max_time = positive(sim, "max_time", 60.0);
    c.sim.goal_tol = positive(sim, "goal_tol", 0.05);
    const std::string integ = sim.value("integrator", "rk4");
    if (integ == "rk4") c.sim.integrator = simulation::Integrator::RK4;
    else if (integ == "euler") c.sim.integrator = simulation::Integrator::Euler;
    else fail(ErrorKind::ConfigError, "field 'sim.integrator' must be rk4 or euler");
    const json gs = sim.value("gaussian", json::object());
    c.gaussian.kind = simulation::SensorModel::Kind::Gaussian;
    c.gaussian.drift = gs.contains("drift") ? Eigen::VectorXd(to_vec(gs.at("drift"), "sim.gaussian.drift") * pitch)
                                            : Eigen::VectorXd(Eigen::VectorXd::Zero(c.env.dimension));
    c.gaussian.variance = gs.value("variance", 0.0) * pitch * pitch;
    const std::string sensor = sim.value("sensor", "delta");
    if (sensor == "gaussian") c.sim.sensor = c.gaussian;
    else if (sensor != "delta") fail(ErrorKind::ConfigError, "field 'sim.sensor' must be delta or gaussian");
    if (sim.contains("starts")) {
      for (const auto& p : sim.at("starts")) c.starts.push_back(to_vec(p, "sim.starts"));
    } else {
      c.starts.push_back(c.env.start);
    }
    const json f = j.value("field", json::object());
    c.field_resolution = f.value("resolution", 15);
    c.field_cells = f.value("cells", std::vector<int>{});
    const json v = j.value("verify", json::object());
    c.sampling.count = v.value("samples", 200);
    c.seed = j.value("seed", 1);
    c.sampling.seed = c.seed;
    c.sim.seed = c.seed;
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigError, std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  return run_config_from_json(read_json(path), path.parent_path());
}

void override_bounds(RunConfig& c, std::optional<double> epsilon, std::optional<double> sigma_m) {
  const double pitch = c.bounds_in_pitch ? c.synth.grid.pitch(0) : 1.0;
  if (epsilon) {
    if (*epsilon < 0) fail(ErrorKind::ConfigError, "--eps must be non-negative");
    c.synth.bounds.epsilon = *epsilon * pitch;
  }
  if (sigma_m) {
    if (*sigma_m < 0) fail(ErrorKind::ConfigError, "--sigma must be non-negative");
    c.synth.bounds.sigma_m = *sigma_m * pitch;
  }
}

}  // namespace safe_field::config

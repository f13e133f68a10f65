#include "safe_field/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "safe_field/config.hpp"

namespace safe_field::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<int> cells;
  std::string sensor;
  std::optional<double> eps;
  std::optional<double> sigma;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::VerificationFailed:
    case ErrorKind::SafetyViolation:
    case ErrorKind::LeftFreeSpace:
      return 1;
    case ErrorKind::SynthesisInfeasible:
    case ErrorKind::SolverFailure:
    case ErrorKind::NumericalFailure:
      return 3;
    default:
      return 2;
  }
}

void set_log_level() {
  const char* env = std::getenv("SAFE_FIELD_LOG");
  spdlog::set_level(spdlog::level::info);
  if (env) spdlog::set_level(spdlog::level::from_str(env));
  spdlog::set_pattern("[%l] %v");
}

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ConfigError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

ordered_json read_ordered(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot open " + path.string() + " (run synth first)");
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
}

class Runner {
 public:
  explicit Runner(const Options& o) : opt_(o) {
    if (o.config.empty()) fail(ErrorKind::ConfigError, "--config is required");
    cfg_ = config::load_run_config(o.config);
    config::override_bounds(cfg_, o.eps, o.sigma);
    if (o.seed) {
      cfg_.seed = *o.seed;
      cfg_.sampling.seed = *o.seed;
      cfg_.sim.seed = *o.seed;
    }
    if (!o.out.empty()) cfg_.out_dir = o.out;
    if (o.sensor == "gaussian") cfg_.sim.sensor = cfg_.gaussian;
    else if (o.sensor == "delta") cfg_.sim.sensor = simulation::SensorModel{};
    fs::create_directories(cfg_.out_dir);
    graph_ = planning::build_graph(cfg_.env);
    plan_ = planning::make_plan(cfg_.env, graph_, cfg_.mode);
  }

  int synth() {
    const auto cs = synthesis::synthesize_environment(cfg_.env, plan_, cfg_.synth, opt_.cells);
    write_json(cfg_.out_dir / "controllers.json", synthesis::bundle_to_json(cs));
    spdlog::info("synthesized {} controllers", cs.size());
    return 0;
  }

  int verify() {
    const auto cs = load_controllers();
    std::vector<verification::VerificationReport> reps;
    for (const auto& c : cs) {
      reps.push_back(verification::verify_controller(c, cfg_.env.cell(c.cell_id), cfg_.sampling,
                                                     cfg_.synth.dynamics));
    }
    write_json(cfg_.out_dir / "report.json", verification::report_to_json(reps));
    for (const auto& r : reps) {
      if (!r.pass) {
        try {
          verification::require_pass(r);
        } catch (const Error& e) {
          spdlog::error("{}", e.what());
        }
        return 1;
      }
    }
    spdlog::info("verification passed for {} cells", reps.size());
    return 0;
  }

  int simulate() {
    const auto cs = load_controllers();
    const std::string tag =
        cfg_.sim.sensor.kind == simulation::SensorModel::Kind::Gaussian ? "gaussian" : "delta";
    ordered_json summary = ordered_json::array();
    int code = 0;
    for (size_t i = 0; i < cfg_.starts.size(); ++i) {
      const auto tr = simulation::run_trajectory(cfg_.env, plan_, cs, cfg_.sim, cfg_.starts[i],
                                                 cfg_.synth.dynamics);
      std::ofstream out(cfg_.out_dir / ("trajectory_" + tag + "_" + std::to_string(i) + ".csv"));
      simulation::write_trajectory_csv(out, tr);
      double min_h = lp::kInf;
      for (double h : tr.min_h) min_h = std::min(min_h, h);
      ordered_json s;
      s["start"] = std::vector<double>(cfg_.starts[i].data(), cfg_.starts[i].data() + cfg_.starts[i].size());
      s["sensor"] = tag;
      s["status"] = simulation::to_string(tr.status);
      s["time"] = tr.t.back();
      s["switches"] = tr.switches;
      s["min_h"] = min_h;
      s["final"] = std::vector<double>(tr.x.back().data(), tr.x.back().data() + tr.x.back().size());
      summary.push_back(s);
      const bool ok = tr.status == simulation::Status::GoalReached ||
                      (cfg_.mode == planning::Mode::Patrol && tr.status == simulation::Status::MaxTime);
      if (!ok) code = 1;
      spdlog::info("start {}: {} after {:.2f}s", i, simulation::to_string(tr.status), tr.t.back());
    }
    write_json(cfg_.out_dir / ("simulation_" + tag + ".json"), summary);
    return code;
  }

  int field() {
    const auto cs = load_controllers();
    const std::string tag =
        cfg_.sim.sensor.kind == simulation::SensorModel::Kind::Gaussian ? "gaussian" : "delta";
    for (const auto& c : cs) {
      if (!cfg_.field_cells.empty() &&
          std::find(cfg_.field_cells.begin(), cfg_.field_cells.end(), c.cell_id) == cfg_.field_cells.end()) {
        continue;
      }
      const auto f = simulation::sample_vector_field(cfg_.env.cell(c.cell_id), c,
                                                     cfg_.field_resolution, cfg_.sim.sensor);
      std::ofstream out(cfg_.out_dir / ("field_cell" + std::to_string(c.cell_id) + "_" + tag + ".csv"));
      simulation::write_field_csv(out, f);
    }
    return 0;
  }

  int pipeline() {
    int code = synth();
    if (code) return code;
    code = verify();
    if (code) return code;
    code = simulate();
    const int f = field();
    return code ? code : f;
  }

 private:
  std::vector<synthesis::CellController> load_controllers() {
    return synthesis::bundle_from_json(read_ordered(cfg_.out_dir / "controllers.json"));
  }

  Options opt_;
  config::RunConfig cfg_;
  planning::CellGraph graph_;
  planning::HighLevelPlan plan_;
};

}  // namespace

int run_command(int argc, char** argv) {
  set_log_level();
  CLI::App app{"Robust CLF/CBF controller synthesis from landmark PMFs"};
  app.require_subcommand(1);
  Options opt;
  std::vector<CLI::App*> subs;
  for (const char* name : {"synth", "verify", "simulate", "field", "pipeline"}) {
    CLI::App* s = app.add_subcommand(name);
    s->add_option("--config", opt.config, "run configuration JSON")->required();
    s->add_option("--out", opt.out, "output directory");
    s->add_option("--seed", opt.seed, "random seed");
    s->add_option("--cells", opt.cells, "subset of cell ids")->delimiter(',');
    s->add_option("--sensor", opt.sensor, "sensor model")->check(CLI::IsMember({"delta", "gaussian"}));
    s->add_option("--eps", opt.eps, "mean error bound override");
    s->add_option("--sigma", opt.sigma, "MAD bound override");
    subs.push_back(s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    Runner r(opt);
    if (subs[0]->parsed()) return r.synth();
    if (subs[1]->parsed()) return r.verify();
    if (subs[2]->parsed()) return r.simulate();
    if (subs[3]->parsed()) return r.field();
    return r.pipeline();
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    spdlog::error("ConfigError: {}", e.what());
    return 2;
  }
}

}  // namespace safe_field::cli

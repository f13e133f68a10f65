#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "synthesis_internal.hpp"

namespace safe_field::synthesis {

using nlohmann::ordered_json;

CellProblem build_cell_problem(const geometry::Environment& env,
                               const planning::ExitAssignment& exit,
                               const SynthesisConfig& config) {
  CellProblem p;
  p.cell = env.cell(exit.cell_id);
  p.exit = exit;
  p.bounds = config.bounds;
  p.check_assembled = config.check_assembled;
  const int d = p.cell.body.dim();
  if (config.dynamics.d() != d || config.grid.dim() != d) {
    fail(ErrorKind::DimensionMismatch, "dynamics, grid and cell dimensions disagree");
  }
  measurement::validate(config.grid);
  if (config.bounds.epsilon < 0 || config.bounds.sigma_m < 0) {
    fail(ErrorKind::ConfigError, "uncertainty bounds must be non-negative");
  }
  if (p.cell.landmark_ids.empty()) {
    fail(ErrorKind::LandmarkNotVisible, "cell " + std::to_string(p.cell.id) + " has no landmark");
  }
  measurement::warn_if_below_resolution(config.grid, config.bounds);
  const measurement::ExpectationKernel kernel = measurement::build_expectation_kernel(config.grid);
  for (int id : p.cell.landmark_ids) {
    const Vec& l = env.landmarks.at(id);
    for (const Vec& v : p.cell.vertices) {
      for (int q = 0; q < d; ++q) {
        if (std::abs(l(q) - v(q)) > config.grid.width[q] / 2 + 1e-12) {
          fail(ErrorKind::LandmarkNotVisible,
               "landmark " + std::to_string(id) + " leaves the sensor grid from a vertex of cell " +
                   std::to_string(p.cell.id));
        }
      }
    }
    p.landmark_ids.push_back(id);
    p.landmarks.push_back(l);
    p.kernels.push_back(kernel);
    p.basis.push_back(clfcbf::build_gain_basis(config.basis_names, kernel));
    p.blocks.push_back(measurement::assemble_probability_constraints(kernel, config.bounds, l));
  }
  p.layout.n_u = config.dynamics.n_u();
  p.layout.d = d;
  p.layout.n_landmarks = static_cast<int>(p.landmarks.size());
  p.layout.n_maps = static_cast<int>(config.basis_names.size());

  p.rows.push_back(clfcbf::build_clf_row(exit.v, exit.o, config.dynamics, config.alpha_v,
                                         p.layout, p.basis));
  p.omega.push_back(config.omega_clf);
  p.margin.push_back(exit.is_goal ? MarginKind::Free : MarginKind::NonNegative);
  for (auto& r : clfcbf::build_cbf_rows(p.cell.body.normals, p.cell.body.offsets,
                                        exit.barrier_rows, config.dynamics, config.alpha_h,
                                        p.layout, p.basis)) {
    p.rows.push_back(std::move(r));
    p.omega.push_back(config.omega_cbf);
    p.margin.push_back(MarginKind::NonNegative);
  }
  if (config.u_max) {
    for (auto& r : clfcbf::build_input_rows(*config.u_max, p.layout, p.basis)) {
      p.rows.push_back(std::move(r));
      p.omega.push_back(0.0);
      p.margin.push_back(MarginKind::Zero);
    }
  }
  if (exit.is_goal && config.goal_constraint) {
    std::vector<Vec> pmfs;
    for (const Vec& l : p.landmarks) {
      const Vec y = l - env.goal;
      for (int q = 0; q < d; ++q) {
        if (std::abs(y(q)) > config.grid.width[q] / 2 + 1e-12) {
          fail(ErrorKind::GoalObservationOffGrid, "landmark seen from the goal is off the grid");
        }
      }
      pmfs.push_back(measurement::make_delta_pmf(config.grid, y).mass);
    }
    p.goal_pmfs = std::move(pmfs);
  }
  return p;
}

StackedLayout stack_landmarks(const std::vector<measurement::ExpectationKernel>& kernels) {
  StackedLayout s;
  for (const auto& k : kernels) {
    s.offsets.push_back(s.total);
    s.total += k.spec.points();
  }
  return s;
}

namespace {

void check_status(const lp::LpSolution& sol, int cell) {
  if (sol.status == lp::Status::Infeasible) {
    fail(ErrorKind::SynthesisInfeasible,
         "cell " + std::to_string(cell) + ": no robust gain satisfies the constraints");
  }
  if (sol.status == lp::Status::Unbounded) {
    fail(ErrorKind::SolverFailure,
         "cell " + std::to_string(cell) + ": margins unbounded (set u_max)");
  }
}

CellController base_controller(const CellProblem& p) {
  CellController c;
  c.cell_id = p.cell.id;
  c.exit = p.exit;
  c.landmark_ids = p.landmark_ids;
  c.landmarks = p.landmarks;
  c.basis_names = p.basis.front().names;
  c.grid = p.kernels.front().spec;
  c.gains.layout = p.layout;
  c.bounds = p.bounds;
  for (const auto& r : p.rows) c.row_labels.push_back(r.label());
  return c;
}

std::vector<RowMultipliers> read_assembled(const AssembledLp& a, const std::vector<double>& x) {
  std::vector<RowMultipliers> out;
  for (const RowIndex& ri : a.rows) {
    RowMultipliers m;
    m.delta = x[ri.delta];
    m.lambda_x.resize(ri.lambda_x.size());
    for (size_t j = 0; j < ri.lambda_x.size(); ++j) m.lambda_x(j) = x[ri.lambda_x[j]];
    for (const auto& pl : ri.landmarks) {
      LandmarkMultipliers lm;
      const int d = static_cast<int>(pl.lambda_z.size());
      const int np = static_cast<int>(pl.beta.size());
      const int nc = np ? static_cast<int>(pl.beta[0].size()) : 0;
      lm.lambda_p.resize(pl.lambda_p.size());
      for (size_t r = 0; r < pl.lambda_p.size(); ++r) lm.lambda_p(r) = x[pl.lambda_p[r]];
      lm.lambda_s = x[pl.lambda_s];
      lm.lambda_z.resize(d);
      for (int q = 0; q < d; ++q) lm.lambda_z(q) = x[pl.lambda_z[q]];
      lm.rho1.resize(d, np);
      lm.rho2.resize(d, np);
      lm.eta1.resize(d, np);
      lm.eta2.resize(d, np);
      lm.beta.resize(np, nc);
      for (int q = 0; q < d; ++q)
        for (int i = 0; i < np; ++i) {
          lm.rho1(q, i) = x[pl.rho1[q][i]];
          lm.rho2(q, i) = x[pl.rho2[q][i]];
          lm.eta1(q, i) = x[pl.eta1[q][i]];
          lm.eta2(q, i) = x[pl.eta2[q][i]];
        }
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < nc; ++j) lm.beta(i, j) = x[pl.beta[i][j]];
      m.landmarks.push_back(std::move(lm));
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

double optimal_objective(const CellProblem& p, SolveMethod method) {
  lp::LpSolution sol;
  switch (method) {
    case SolveMethod::Reduced: sol = lp::solve_lp(assemble_reduced_lp(p).lp); break;
    case SolveMethod::Assembled: sol = lp::solve_lp(assemble_robust_lp(p).lp); break;
    case SolveMethod::Machine: sol = lp::solve_lp(assemble_machine_lp(p)); break;
  }
  check_status(sol, p.cell.id);
  return sol.objective;
}

CellController synthesize_cell_controller(const CellProblem& p, SolveMethod method) {
  CellController c = base_controller(p);
  const int ng = p.layout.size();
  std::vector<double> x;
  if (method == SolveMethod::Reduced) {
    const ReducedLp red = assemble_reduced_lp(p);
    const lp::LpSolution sol = lp::solve_lp(red.lp);
    check_status(sol, p.cell.id);
    x = sol.x;
    c.objective = sol.objective;
    c.gains.values = Eigen::Map<const Vec>(x.data(), ng);
    c.duals = recover_multipliers(p, red, x);
    if (p.check_assembled) {
      const AssembledLp full = assemble_robust_lp(p);
      const std::vector<double> pt = assembled_point(full, c.gains.values, c.duals);
      const lp::Residual res = lp::primal_residual(full.lp, pt);
      double scale = 1.0;
      for (double v : pt) scale = std::max(scale, std::abs(v));
      c.assembled_residual = std::max(res.rows, res.bounds);
      if (c.assembled_residual > 1e-6 * scale) {
        fail(ErrorKind::NumericalFailure,
             "cell " + std::to_string(p.cell.id) + ": recovered multipliers violate row " +
                 res.worst_row + " by " + std::to_string(c.assembled_residual));
      }
    }
  } else if (method == SolveMethod::Assembled) {
    const AssembledLp full = assemble_robust_lp(p);
    const lp::LpSolution sol = lp::solve_lp(full.lp);
    check_status(sol, p.cell.id);
    x = sol.x;
    c.objective = sol.objective;
    c.gains.values = Eigen::Map<const Vec>(x.data(), ng);
    c.duals = read_assembled(full, x);
  } else {
    const lp::StandardLp m = assemble_machine_lp(p);
    const lp::LpSolution sol = lp::solve_lp(m);
    check_status(sol, p.cell.id);
    c.objective = sol.objective;
    c.gains.values = Eigen::Map<const Vec>(sol.x.data(), ng);
    for (size_t k = 0; k < p.rows.size(); ++k) {
      RowMultipliers rm;
      rm.delta = sol.x[m.at("delta[" + std::to_string(k) + "]")];
      c.duals.push_back(std::move(rm));
    }
  }
  for (const auto& d : c.duals) c.margins.push_back(d.delta);
  return c;
}

std::vector<CellController> synthesize_environment(const geometry::Environment& env,
                                                   const planning::HighLevelPlan& plan,
                                                   const SynthesisConfig& config,
                                                   const std::vector<int>& only_cells) {
  std::vector<CellController> out;
  for (const auto& exit : plan.exits) {
    if (!only_cells.empty() &&
        std::find(only_cells.begin(), only_cells.end(), exit.cell_id) == only_cells.end()) {
      continue;
    }
    try {
      const CellProblem p = build_cell_problem(env, exit, config);
      CellController c = synthesize_cell_controller(p, SolveMethod::Reduced);
      c.alpha_v = config.alpha_v;
      c.alpha_h = config.alpha_h;
      c.u_max = config.u_max;
      spdlog::info("cell {}: objective {:.6g}", c.cell_id, c.objective);
      if (config.cross_check) {
        const double m = optimal_objective(p, SolveMethod::Machine);
        if (std::abs(m - c.objective) > 1e-6 * std::max(1.0, std::abs(m))) {
          spdlog::warn("cell {}: machine-dual objective {} differs from {}", c.cell_id, m,
                       c.objective);
        }
      }
      out.push_back(std::move(c));
    } catch (const Error& e) {
      if (std::string(e.what()).find("cell ") != std::string::npos) throw;
      fail(e.kind(), "cell " + std::to_string(exit.cell_id) + ": " + e.what());
    }
  }
  return out;
}

namespace {

ordered_json vec_json(const Vec& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec json_vec(const ordered_json& a) {
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

}  // namespace

ordered_json controller_to_json(const CellController& c) {
  ordered_json j;
  j["id"] = c.cell_id;
  j["status"] = lp::to_string(c.status);
  j["basis"] = c.basis_names;
  j["landmark_ids"] = c.landmark_ids;
  ordered_json lms = ordered_json::array();
  for (const auto& l : c.landmarks) lms.push_back(vec_json(l));
  j["landmarks"] = lms;
  ordered_json K = ordered_json::array();
  for (int L = 0; L < c.gains.layout.n_landmarks; ++L) {
    ordered_json per = ordered_json::array();
    for (int m = 0; m < c.gains.layout.n_maps; ++m) {
      const Mat k = c.gains.K(L, m);
      ordered_json rows = ordered_json::array();
      for (int a = 0; a < k.rows(); ++a) rows.push_back(vec_json(k.row(a).transpose()));
      per.push_back(rows);
    }
    K.push_back(per);
  }
  j["K"] = K;
  j["K_b"] = vec_json(c.gains.Kb());
  j["rows"] = c.row_labels;
  j["delta"] = c.margins;
  j["objective"] = c.objective;
  j["alpha_v"] = c.alpha_v;
  j["alpha_h"] = c.alpha_h;
  j["epsilon"] = c.bounds.epsilon;
  j["sigma_m"] = c.bounds.sigma_m;
  if (c.u_max) j["u_max"] = *c.u_max;
  j["grid"] = {{"n", c.grid.n}, {"width", c.grid.width}};
  ordered_json e;
  e["successor"] = c.exit.successor;
  e["is_goal"] = c.exit.is_goal;
  if (c.exit.exit_face) e["exit_face"] = *c.exit.exit_face;
  e["v"] = vec_json(c.exit.v);
  e["o"] = vec_json(c.exit.o);
  e["barrier_rows"] = c.exit.barrier_rows;
  j["exit"] = e;
  return j;
}

CellController controller_from_json(const ordered_json& j) {
  try {
    CellController c;
    c.cell_id = j.at("id").get<int>();
    const std::string st = j.value("status", "Optimal");
    c.status = st == "Optimal" ? lp::Status::Optimal
               : st == "Infeasible" ? lp::Status::Infeasible : lp::Status::Unbounded;
    c.basis_names = j.at("basis").get<std::vector<std::string>>();
    c.landmark_ids = j.at("landmark_ids").get<std::vector<int>>();
    for (const auto& l : j.at("landmarks")) c.landmarks.push_back(json_vec(l));
    c.grid.n = j.at("grid").at("n").get<std::vector<int>>();
    c.grid.width = j.at("grid").at("width").get<std::vector<double>>();
    const auto& K = j.at("K");
    auto& g = c.gains.layout;
    g.n_landmarks = static_cast<int>(K.size());
    g.n_maps = static_cast<int>(c.basis_names.size());
    g.n_u = static_cast<int>(j.at("K_b").size());
    g.d = c.grid.dim();
    c.gains.values = Vec::Zero(g.size());
    for (int L = 0; L < g.n_landmarks; ++L)
      for (int m = 0; m < g.n_maps; ++m)
        for (int a = 0; a < g.n_u; ++a)
          for (int b = 0; b < g.d; ++b)
            c.gains.values(g.K(L, m, a, b)) = K.at(L).at(m).at(a).at(b).get<double>();
    const Vec kb = json_vec(j.at("K_b"));
    for (int a = 0; a < g.n_u; ++a) c.gains.values(g.Kb(a)) = kb(a);
    c.row_labels = j.at("rows").get<std::vector<std::string>>();
    c.margins = j.at("delta").get<std::vector<double>>();
    c.objective = j.value("objective", 0.0);
    c.alpha_v = j.at("alpha_v").get<double>();
    c.alpha_h = j.at("alpha_h").get<double>();
    c.bounds.epsilon = j.at("epsilon").get<double>();
    c.bounds.sigma_m = j.at("sigma_m").get<double>();
    if (j.contains("u_max")) c.u_max = j.at("u_max").get<double>();
    const auto& e = j.at("exit");
    c.exit.cell_id = c.cell_id;
    c.exit.successor = e.at("successor").get<int>();
    c.exit.is_goal = e.at("is_goal").get<bool>();
    if (e.contains("exit_face")) c.exit.exit_face = e.at("exit_face").get<int>();
    c.exit.v = json_vec(e.at("v"));
    c.exit.o = json_vec(e.at("o"));
    c.exit.barrier_rows = e.at("barrier_rows").get<std::vector<int>>();
    for (double dl : c.margins) {
      RowMultipliers rm;
      rm.delta = dl;
      c.duals.push_back(std::move(rm));
    }
    return c;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::ConfigError, std::string("controller JSON: ") + ex.what());
  }
}

ordered_json bundle_to_json(const std::vector<CellController>& cs) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& c : cs) arr.push_back(controller_to_json(c));
  j["controllers"] = arr;
  return j;
}

std::vector<CellController> bundle_from_json(const ordered_json& j) {
  std::vector<CellController> out;
  if (!j.contains("controllers")) fail(ErrorKind::ConfigError, "controller bundle lacks 'controllers'");
  for (const auto& c : j.at("controllers")) out.push_back(controller_from_json(c));
  return out;
}

}  // namespace safe_field::synthesis

#include "safe_field/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace safe_field::simulation {

const char* to_string(Status s) {
  switch (s) {
    case Status::GoalReached: return "GoalReached";
    case Status::MaxTime: return "MaxTime";
    case Status::SafetyViolation: return "SafetyViolation";
    case Status::LeftFreeSpace: return "LeftFreeSpace";
  }
  return "?";
}

PreparedController prepare(const synthesis::CellController& c) {
  PreparedController p;
  p.source = &c;
  const auto kernel = measurement::build_expectation_kernel(c.grid);
  const auto basis = clfcbf::build_gain_basis(c.basis_names, kernel);
  for (int L = 0; L < c.gains.layout.n_landmarks; ++L) {
    Mat M = Mat::Zero(c.gains.layout.n_u, c.grid.points());
    for (int m = 0; m < c.gains.layout.n_maps; ++m) M += c.gains.K(L, m) * basis.maps[m];
    p.M.push_back(std::move(M));
  }
  p.Kb = c.gains.Kb();
  return p;
}

Vec control_input(const PreparedController& c, const std::vector<measurement::PmfGrid>& pmfs) {
  if (pmfs.size() != c.M.size()) fail(ErrorKind::DimensionMismatch, "one PMF per landmark expected");
  Vec u = c.Kb;
  for (size_t L = 0; L < pmfs.size(); ++L) {
    if (!(pmfs[L].spec == c.source->grid)) {
      fail(ErrorKind::GridMismatch, "PMF grid differs from the controller grid");
    }
    u += c.M[L] * pmfs[L].mass;
  }
  return u;
}

Vec control_input(const synthesis::CellController& c,
                  const std::vector<measurement::PmfGrid>& pmfs) {
  return control_input(prepare(c), pmfs);
}

measurement::PmfGrid sense(const measurement::GridSpec& grid, const Vec& landmark, const Vec& x,
                           const SensorModel& model) {
  measurement::PmfGrid p = measurement::make_delta_pmf(grid, landmark - x);
  if (model.kind == SensorModel::Kind::Gaussian) {
    p = measurement::blur_pmf(p, model.drift, model.variance);
  }
  return p;
}

namespace {

struct Active {
  const synthesis::CellController* c = nullptr;
  PreparedController prepared;
  const geometry::ConvexCell* cell = nullptr;
};

Vec sensed_input(const Active& a, const Vec& x, const SensorModel& s) {
  std::vector<measurement::PmfGrid> pmfs;
  for (const Vec& l : a.c->landmarks) pmfs.push_back(sense(a.c->grid, l, x, s));
  return control_input(a.prepared, pmfs);
}

Vec step(const clfcbf::Dynamics& dyn, const Vec& x, const Vec& u, double dt, Integrator in) {
  auto f = [&](const Vec& y) -> Vec { return dyn.A * y + dyn.B * u; };
  if (in == Integrator::Euler) return x + dt * f(x);
  const Vec k1 = f(x);
  const Vec k2 = f(x + 0.5 * dt * k1);
  const Vec k3 = f(x + 0.5 * dt * k2);
  const Vec k4 = f(x + dt * k3);
  return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

Vec barrier_values(const Active& a, const Vec& x) {
  const auto& rows = a.c->exit.barrier_rows;
  Vec h(rows.size());
  for (size_t j = 0; j < rows.size(); ++j) h(j) = a.cell->barrier(rows[j], x);
  return h;
}

}  // namespace

Trajectory run_trajectory(const geometry::Environment& env, const planning::HighLevelPlan& plan,
                          const std::vector<synthesis::CellController>& controllers,
                          const SimConfig& config, const Vec& x0, const clfcbf::Dynamics& dyn) {
  if (config.dt <= 0 || config.goal_tol <= 0) fail(ErrorKind::ConfigError, "dt and goal_tol must be positive");
  std::map<int, const synthesis::CellController*> by_cell;
  for (const auto& c : controllers) by_cell[c.cell_id] = &c;
  auto activate = [&](int cell_id) {
    auto it = by_cell.find(cell_id);
    if (it == by_cell.end()) {
      fail(ErrorKind::DimensionMismatch, "no controller for cell " + std::to_string(cell_id));
    }
    Active a;
    a.c = it->second;
    a.prepared = prepare(*a.c);
    a.cell = &env.cell(cell_id);
    return a;
  };
  int first = -1;
  for (const auto& c : env.cells) {
    if (by_cell.count(c.id) && geometry::contains_point(c, x0, 1e-9)) {
      first = c.id;
      break;
    }
  }
  if (first < 0) fail(ErrorKind::LeftFreeSpace, "start state is not inside a controlled cell");
  (void)plan;

  Active act = activate(first);
  Trajectory tr;
  Vec x = x0;
  double t = 0.0;
  const long steps = static_cast<long>(std::llround(config.max_time / config.dt));
  auto record = [&](const Vec& u) {
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.cell.push_back(act.c->cell_id);
    tr.u.push_back(u);
    const Vec h = barrier_values(act, x);
    tr.h.push_back(h);
    tr.min_h.push_back(h.size() ? h.minCoeff() : lp::kInf);
    tr.V.push_back(act.c->exit.clf(x));
  };
  auto at_goal = [&] {
    return plan.mode == planning::Mode::Stabilize && (x - env.goal).norm() <= config.goal_tol;
  };
  tr.status = Status::MaxTime;
  for (long n = 0;; ++n) {
    const Vec u = sensed_input(act, x, config.sensor);
    record(u);
    if (tr.min_h.back() < -1e-6) {
      tr.status = Status::SafetyViolation;
      break;
    }
    if (at_goal()) {
      tr.goal_reached = true;
      if (config.stop_at_goal) {
        tr.status = Status::GoalReached;
        break;
      }
    }
    if (n >= steps) {
      if (tr.goal_reached) tr.status = Status::GoalReached;
      break;
    }
    x = step(dyn, x, u, config.dt, config.integrator);
    t = (n + 1) * config.dt;
    if (!x.allFinite() || geometry::locate_cell(env, x, 1e-9) < 0) {
      record(u);
      tr.status = Status::LeftFreeSpace;
      break;
    }
    if (!act.c->exit.is_goal && act.c->exit.clf(x) <= 0.0) {
      act = activate(act.c->exit.successor);
      ++tr.switches;
      spdlog::debug("t={:.2f}: switch to cell {}", t, act.c->cell_id);
    }
  }
  return tr;
}

std::vector<FieldSample> sample_vector_field(const geometry::ConvexCell& cell,
                                             const synthesis::CellController& c,
                                             int resolution, const SensorModel& sensor) {
  if (resolution < 2) fail(ErrorKind::ConfigError, "vector field resolution must be at least 2");
  Vec lo = cell.vertices.front(), hi = cell.vertices.front();
  for (const Vec& v : cell.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const PreparedController pc = prepare(c);
  std::vector<FieldSample> out;
  for (int b = 0; b < resolution; ++b) {
    for (int a = 0; a < resolution; ++a) {
      Vec x(2);
      x << lo(0) + (hi(0) - lo(0)) * a / (resolution - 1),
          lo(1) + (hi(1) - lo(1)) * b / (resolution - 1);
      if (!geometry::contains_point(cell, x, 1e-12)) continue;
      std::vector<measurement::PmfGrid> pmfs;
      for (const Vec& l : c.landmarks) pmfs.push_back(sense(c.grid, l, x, sensor));
      out.push_back({x, control_input(pc, pmfs)});
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const int d = tr.x.empty() ? 2 : static_cast<int>(tr.x.front().size());
  const int nu = tr.u.empty() ? 2 : static_cast<int>(tr.u.front().size());
  os << "t";
  for (int q = 0; q < d; ++q) os << ",x" << q + 1;
  for (int a = 0; a < nu; ++a) os << ",u" << a + 1;
  os << ",cell_id,V,min_h\n";
  for (size_t n = 0; n < tr.t.size(); ++n) {
    os << fmt::format("{:.4f}", tr.t[n]);
    for (int q = 0; q < d; ++q) os << fmt::format(",{:.10g}", tr.x[n](q));
    for (int a = 0; a < nu; ++a) os << fmt::format(",{:.10g}", tr.u[n](a));
    os << "," << tr.cell[n] << fmt::format(",{:.10g},{:.10g}\n", tr.V[n], tr.min_h[n]);
  }
}

void write_field_csv(std::ostream& os, const std::vector<FieldSample>& f) {
  os << "x1,x2,u1,u2\n";
  for (const auto& s : f) {
    os << fmt::format("{:.10g},{:.10g},{:.10g},{:.10g}\n", s.x(0), s.x(1), s.u(0), s.u(1));
  }
}

}  // namespace safe_field::simulation

#include "safe_field/planning.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "safe_field/errors.hpp"

namespace safe_field::planning {

using geometry::ConvexCell;
using geometry::Environment;

namespace {

constexpr double kFaceTol = 1e-8;

std::optional<SharedFace> shared_face(const ConvexCell& a, const ConvexCell& b) {
  for (int ra = 0; ra < a.body.rows(); ++ra) {
    const Vec na = a.body.normals.row(ra).transpose();
    for (int rb = 0; rb < b.body.rows(); ++rb) {
      const Vec nb = b.body.normals.row(rb).transpose();
      if ((na + nb).norm() > kFaceTol) continue;
      if (std::abs(a.body.offsets(ra) + b.body.offsets(rb)) > kFaceTol) continue;
      auto [a0, a1] = a.facet(ra);
      auto [b0, b1] = b.facet(rb);
      const Vec t = (a1 - a0).normalized();
      const double s0 = 0.0, s1 = t.dot(a1 - a0);
      double u0 = t.dot(b0 - a0), u1 = t.dot(b1 - a0);
      if (u0 > u1) std::swap(u0, u1);
      const double lo = std::max(s0, u0), hi = std::min(s1, u1);
      if (hi - lo <= kFaceTol) continue;
      SharedFace f;
      f.cell_a = a.id;
      f.cell_b = b.id;
      f.row_a = ra;
      f.row_b = rb;
      f.p0 = a0 + lo * t;
      f.p1 = a0 + hi * t;
      return f;
    }
  }
  return std::nullopt;
}

std::map<int, int> hop_distances(const CellGraph& g, int from) {
  std::map<int, int> dist;
  dist[from] = 0;
  std::deque<int> q{from};
  while (!q.empty()) {
    const int c = q.front();
    q.pop_front();
    for (int n : g.neighbors(c)) {
      if (!dist.count(n)) {
        dist[n] = dist[c] + 1;
        q.push_back(n);
      }
    }
  }
  return dist;
}

ExitAssignment exit_toward(const Environment& env, const CellGraph& g, int cell,
                           int succ) {
  const auto f = g.face(cell, succ);
  if (!f) {
    fail(ErrorKind::NoPath, "cells " + std::to_string(cell) + " and " +
                                std::to_string(succ) + " are not adjacent");
  }
  const ConvexCell& c = env.cell(cell);
  ExitAssignment e;
  e.cell_id = cell;
  e.exit_face = f->row_a;
  e.successor = succ;
  e.v = -c.body.normals.row(f->row_a).transpose();
  e.o = 0.5 * (f->p0 + f->p1);
  for (int j = 0; j < c.body.rows(); ++j) {
    if (j != f->row_a) e.barrier_rows.push_back(j);
  }
  return e;
}

ExitAssignment goal_assignment(const Environment& env, const CellGraph& g,
                               int cell) {
  const ConvexCell& c = env.cell(cell);
  const int n = static_cast<int>(c.vertices.size());
  int gi = -1;
  for (int i = 0; i < n; ++i) {
    if ((c.vertices[i] - env.goal).norm() <= geometry::kContainTol) gi = i;
  }
  if (gi < 0) {
    fail(ErrorKind::GoalNotVertex,
         "goal is not a vertex of goal cell " + std::to_string(cell));
  }
  ExitAssignment e;
  e.cell_id = cell;
  e.is_goal = true;
  e.o = env.goal;
  const Vec e1 = (c.vertices[(gi + 1) % n] - env.goal).normalized();
  const Vec e2 = (c.vertices[(gi + n - 1) % n] - env.goal).normalized();
  e.v = (e1 + e2).normalized();
  for (const auto& v : c.vertices) {
    if (e.clf(v) < -1e-9) {
      fail(ErrorKind::GoalNotVertex, "goal-cell Lyapunov function is negative");
    }
  }
  for (int j = 0; j < c.body.rows(); ++j) {
    bool shared = false;
    for (const auto& f : g.edges) {
      if ((f.cell_a == cell && f.row_a == j) || (f.cell_b == cell && f.row_b == j)) {
        shared = true;
      }
    }
    if (!shared) e.barrier_rows.push_back(j);
  }
  return e;
}

}  // namespace

std::vector<int> CellGraph::neighbors(int id) const {
  std::vector<int> out;
  for (const auto& e : edges) {
    if (e.cell_a == id) out.push_back(e.cell_b);
    if (e.cell_b == id) out.push_back(e.cell_a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<SharedFace> CellGraph::face(int from, int to) const {
  for (const auto& e : edges) {
    if (e.cell_a == from && e.cell_b == to) return e;
    if (e.cell_b == from && e.cell_a == to) {
      SharedFace f = e;
      std::swap(f.cell_a, f.cell_b);
      std::swap(f.row_a, f.row_b);
      return f;
    }
  }
  return std::nullopt;
}

bool HighLevelPlan::has(int cell) const {
  return std::any_of(exits.begin(), exits.end(),
                     [&](const ExitAssignment& e) { return e.cell_id == cell; });
}

const ExitAssignment& HighLevelPlan::exit(int cell) const {
  for (const auto& e : exits) {
    if (e.cell_id == cell) return e;
  }
  fail(ErrorKind::NoPath, "cell " + std::to_string(cell) + " is not in the plan");
}

CellGraph build_graph(const Environment& env) {
  CellGraph g;
  for (const auto& c : env.cells) g.nodes.push_back(c.id);
  for (size_t i = 0; i < env.cells.size(); ++i) {
    for (size_t j = i + 1; j < env.cells.size(); ++j) {
      if (auto f = shared_face(env.cells[i], env.cells[j])) g.edges.push_back(*f);
    }
  }
  if (env.start.size() == env.dimension && env.goal.size() == env.dimension) {
    const int s = geometry::locate_cell(env, env.start, geometry::kContainTol);
    const int t = geometry::find_goal_cell(env);
    if (s < 0) fail(ErrorKind::LeftFreeSpace, "start is outside every cell");
    if (!hop_distances(g, t).count(s)) {
      fail(ErrorKind::DisconnectedFreeSpace, "start and goal cells are not connected");
    }
  }
  return g;
}

std::vector<int> shortest_cell_path(const CellGraph& graph, int start_cell,
                                    int goal_cell) {
  const auto has = [&](int id) {
    return std::find(graph.nodes.begin(), graph.nodes.end(), id) != graph.nodes.end();
  };
  if (!has(start_cell) || !has(goal_cell)) {
    fail(ErrorKind::NoPath, "cell id not in graph");
  }
  const auto dist = hop_distances(graph, goal_cell);
  auto it = dist.find(start_cell);
  if (it == dist.end()) {
    fail(ErrorKind::NoPath, "no path from cell " + std::to_string(start_cell) +
                                " to cell " + std::to_string(goal_cell));
  }
  std::vector<int> path{start_cell};
  int cur = start_cell;
  while (cur != goal_cell) {
    const int want = dist.at(cur) - 1;
    for (int n : graph.neighbors(cur)) {
      auto d = dist.find(n);
      if (d != dist.end() && d->second == want) {
        cur = n;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

HighLevelPlan assign_exit_faces(const Environment& env, const CellGraph& graph,
                                const std::vector<int>& path, Mode mode) {
  HighLevelPlan plan;
  plan.mode = mode;
  plan.path = path;
  if (path.empty()) return plan;
  if (mode == Mode::Stabilize) {
    for (size_t i = 0; i + 1 < path.size(); ++i) {
      plan.exits.push_back(exit_toward(env, graph, path[i], path[i + 1]));
    }
    const int goal = geometry::find_goal_cell(env);
    if (path.back() != goal) {
      fail(ErrorKind::NoPath, "path does not end in the goal cell");
    }
    plan.exits.push_back(goal_assignment(env, graph, goal));
    return plan;
  }
  std::vector<int> cycle = path;
  if (cycle.size() > 1 && cycle.front() == cycle.back()) cycle.pop_back();
  if (cycle.size() < 2) fail(ErrorKind::NoPath, "patrol cycle needs two cells");
  for (size_t i = 0; i < cycle.size(); ++i) {
    const int c = cycle[i];
    const int s = cycle[(i + 1) % cycle.size()];
    if (plan.has(c)) {
      if (plan.exit(c).successor != s) {
        fail(ErrorKind::NoPath, "patrol cycle visits cell " + std::to_string(c) +
                                    " with two successors");
      }
      continue;
    }
    plan.exits.push_back(exit_toward(env, graph, c, s));
  }
  return plan;
}

HighLevelPlan make_plan(const Environment& env, const CellGraph& graph, Mode mode) {
  if (mode == Mode::Patrol) {
    return assign_exit_faces(env, graph, env.patrol_cycle, mode);
  }
  const int goal = geometry::find_goal_cell(env);
  const int start = geometry::locate_cell(env, env.start, geometry::kContainTol);
  if (start < 0) fail(ErrorKind::LeftFreeSpace, "start is outside every cell");
  HighLevelPlan plan =
      assign_exit_faces(env, graph, shortest_cell_path(graph, start, goal), mode);
  const auto dist = hop_distances(graph, goal);
  for (int c : graph.nodes) {
    if (plan.has(c) || !dist.count(c)) continue;
    const auto p = shortest_cell_path(graph, c, goal);
    plan.exits.push_back(exit_toward(env, graph, c, p[1]));
  }
  return plan;
}

}  // namespace safe_field::planning

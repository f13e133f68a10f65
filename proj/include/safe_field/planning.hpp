#pragma once

#include <optional>
#include <vector>

#include "safe_field/geometry.hpp"

namespace safe_field::planning {

using geometry::Vec;

struct SharedFace {
  int cell_a = 0;
  int cell_b = 0;
  int row_a = 0;  // facet row in cell_a
  int row_b = 0;  // facet row in cell_b
  Vec p0;         // overlap segment
  Vec p1;
};

struct CellGraph {
  std::vector<int> nodes;
  std::vector<SharedFace> edges;

  std::vector<int> neighbors(int id) const;
  // Face seen from cell `from` (row_a belongs to `from`), if adjacent.
  std::optional<SharedFace> face(int from, int to) const;
  bool adjacent(int a, int b) const { return face(a, b).has_value(); }
};

enum class Mode { Stabilize, Patrol };

struct ExitAssignment {
  int cell_id = 0;
  bool is_goal = false;
  std::optional<int> exit_face;
  int successor = -1;
  Vec v;  // inward unit normal of the exit face, or the goal-cell direction
  Vec o;
  std::vector<int> barrier_rows;

  double clf(const Vec& x) const { return v.dot(x - o); }
};

struct HighLevelPlan {
  Mode mode = Mode::Stabilize;
  std::vector<int> path;
  std::vector<ExitAssignment> exits;

  bool has(int cell) const;
  const ExitAssignment& exit(int cell) const;
};

CellGraph build_graph(const geometry::Environment& env);

std::vector<int> shortest_cell_path(const CellGraph& graph, int start_cell,
                                    int goal_cell);

HighLevelPlan assign_exit_faces(const geometry::Environment& env,
                                const CellGraph& graph,
                                const std::vector<int>& path, Mode mode);

// Stabilize: the start-to-goal path plus a route for every other cell that
// reaches the goal. Patrol: the environment's patrol cycle.
HighLevelPlan make_plan(const geometry::Environment& env, const CellGraph& graph,
                        Mode mode);

}  // namespace safe_field::planning

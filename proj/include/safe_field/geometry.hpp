#pragma once

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace safe_field::geometry {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kContainTol = 1e-9;
inline constexpr double kDedupTol = 1e-8;

// Rows j encode normals.row(j) * x + offsets(j) <= 0.
struct HalfspaceSet {
  Mat normals;
  Vec offsets;

  int rows() const { return static_cast<int>(normals.rows()); }
  int dim() const { return static_cast<int>(normals.cols()); }
  Vec evaluate(const Vec& x) const { return normals * x + offsets; }
};

struct ConvexCell {
  int id = 0;
  HalfspaceSet body;
  std::vector<int> landmark_ids;
  std::vector<Vec> vertices;

  // Endpoints of facet `row` (2D only).
  std::pair<Vec, Vec> facet(int row) const;
  // h_j(x) = -(a_j x + b_j), the normal distance to wall j for unit rows.
  double barrier(int row, const Vec& x) const;
};

struct Environment {
  int dimension = 2;
  std::vector<ConvexCell> cells;
  std::vector<Vec> landmarks;
  Vec start;
  Vec goal;
  std::optional<int> goal_cell;
  std::vector<int> patrol_cycle;

  const ConvexCell& cell(int id) const;
  int cell_index(int id) const;
};

HalfspaceSet polygon_to_halfspaces(const std::vector<Vec>& vertices);

bool contains_point(const HalfspaceSet& body, const Vec& x, double tol);
bool contains_point(const ConvexCell& cell, const Vec& x, double tol);

std::vector<Vec> cell_vertices(const HalfspaceSet& body);

ConvexCell make_cell(int id, const std::vector<Vec>& vertices,
                     std::vector<int> landmark_ids);

// Goal-vertex check and sampled pairwise overlap check.
void validate_environment(const Environment& env);

int find_goal_cell(const Environment& env);

// Lowest-id cell containing x, or -1.
int locate_cell(const Environment& env, const Vec& x, double tol);

bool is_vertex_of(const ConvexCell& cell, const Vec& p, double tol);

// Uniform samples inside the cell by rejection from its bounding box.
std::vector<Vec> sample_interior(const ConvexCell& cell, int count,
                                 std::mt19937_64& rng);

}  // namespace safe_field::geometry

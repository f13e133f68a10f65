#include "safe_field/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "safe_field/errors.hpp"

namespace safe_field::geometry {

namespace {

double cross2(const Vec& a, const Vec& b) { return a(0) * b(1) - a(1) * b(0); }

void require_2d(int d, const char* where) {
  if (d != 2) {
    fail(ErrorKind::DimensionMismatch,
         std::string(where) + " supports d = 2 only");
  }
}

// Recession check: unit normals positively span the plane iff no angular
// gap reaches pi.
bool normals_span_plane(const Mat& normals) {
  std::vector<double> ang;
  for (int j = 0; j < normals.rows(); ++j) {
    ang.push_back(std::atan2(normals(j, 1), normals(j, 0)));
  }
  if (ang.size() < 3) return false;
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + 2 * std::numbers::pi - ang.back();
  for (size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
  return gap < std::numbers::pi - 1e-12;
}

void combinations(int n, int k, int start, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::pair<Vec, Vec> ConvexCell::facet(int row) const {
  require_2d(body.dim(), "facet");
  std::vector<Vec> tight;
  for (const auto& v : vertices) {
    if (std::abs(body.normals.row(row).dot(v) + body.offsets(row)) <= kDedupTol) {
      tight.push_back(v);
    }
  }
  if (tight.size() != 2) {
    fail(ErrorKind::DegenerateInput, "facet " + std::to_string(row) +
                                         " of cell " + std::to_string(id) +
                                         " is not a segment");
  }
  return {tight[0], tight[1]};
}

double ConvexCell::barrier(int row, const Vec& x) const {
  return -(body.normals.row(row).dot(x) + body.offsets(row));
}

const ConvexCell& Environment::cell(int id) const {
  return cells.at(cell_index(id));
}

int Environment::cell_index(int id) const {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].id == id) return static_cast<int>(i);
  }
  fail(ErrorKind::ConfigError, "unknown cell id " + std::to_string(id));
}

HalfspaceSet polygon_to_halfspaces(const std::vector<Vec>& vertices) {
  if (vertices.empty()) fail(ErrorKind::DegenerateInput, "empty polygon");
  const int d = static_cast<int>(vertices.front().size());
  require_2d(d, "polygon_to_halfspaces");
  const int n = static_cast<int>(vertices.size());
  if (n < d + 1) fail(ErrorKind::DegenerateInput, "fewer than d+1 vertices");

  std::vector<Vec> edges(n);
  for (int i = 0; i < n; ++i) {
    edges[i] = vertices[(i + 1) % n] - vertices[i];
    if (edges[i].norm() <= kDedupTol) {
      fail(ErrorKind::DegenerateInput,
           "vertices " + std::to_string(i) + " and " +
               std::to_string((i + 1) % n) + " coincide");
    }
  }
  double turning = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec& e0 = edges[i];
    const Vec& e1 = edges[(i + 1) % n];
    const double c = cross2(e0, e1);
    if (c <= 1e-12 * e0.norm() * e1.norm()) {
      fail(ErrorKind::NonConvexInput,
           "turn at vertex " + std::to_string((i + 1) % n) +
               " is not counterclockwise");
    }
    turning += std::atan2(c, e0.dot(e1));
  }
  if (std::abs(turning - 2 * std::numbers::pi) > 1e-6) {
    fail(ErrorKind::NonConvexInput, "polygon winds more than once");
  }

  HalfspaceSet hs;
  hs.normals.resize(n, d);
  hs.offsets.resize(n);
  for (int i = 0; i < n; ++i) {
    Vec nrm(2);
    nrm << edges[i](1), -edges[i](0);
    nrm /= nrm.norm();
    hs.normals.row(i) = nrm.transpose();
    hs.offsets(i) = -nrm.dot(vertices[i]);
  }
  return hs;
}

bool contains_point(const HalfspaceSet& body, const Vec& x, double tol) {
  return (body.evaluate(x).array() <= tol).all();
}

bool contains_point(const ConvexCell& cell, const Vec& x, double tol) {
  return contains_point(cell.body, x, tol);
}

std::vector<Vec> cell_vertices(const HalfspaceSet& body) {
  const int d = body.dim();
  const int m = body.rows();
  for (int j = 0; j < m; ++j) {
    if (body.normals.row(j).norm() == 0.0) {
      fail(ErrorKind::DegenerateInput, "zero normal in row " + std::to_string(j));
    }
  }
  if (d == 2 && !normals_span_plane(body.normals)) {
    fail(ErrorKind::UnboundedPolytope, "normals do not positively span the plane");
  }

  std::vector<std::vector<int>> combos;
  std::vector<int> cur;
  combinations(m, d, 0, cur, combos);
  std::vector<Vec> pts;
  for (const auto& c : combos) {
    Mat a(d, d);
    Vec b(d);
    for (int r = 0; r < d; ++r) {
      a.row(r) = body.normals.row(c[r]);
      b(r) = -body.offsets(c[r]);
    }
    Eigen::FullPivLU<Mat> lu(a);
    if (lu.rank() < d) continue;
    Vec x = lu.solve(b);
    if (body.evaluate(x).maxCoeff() > kContainTol) continue;
    bool dup = false;
    for (const auto& p : pts) {
      if ((p - x).norm() <= kDedupTol) {
        dup = true;
        break;
      }
    }
    if (!dup) pts.push_back(x);
  }
  if (static_cast<int>(pts.size()) < d + 1) {
    fail(ErrorKind::DegenerateInput, "polytope is empty or lower dimensional");
  }
  if (d == 2) {
    Vec c = Vec::Zero(2);
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    std::sort(pts.begin(), pts.end(), [&](const Vec& a, const Vec& b) {
      return std::atan2(a(1) - c(1), a(0) - c(0)) <
             std::atan2(b(1) - c(1), b(0) - c(0));
    });
  }
  return pts;
}

ConvexCell make_cell(int id, const std::vector<Vec>& vertices,
                     std::vector<int> landmark_ids) {
  ConvexCell cell;
  cell.id = id;
  cell.body = polygon_to_halfspaces(vertices);
  cell.landmark_ids = std::move(landmark_ids);
  cell.vertices = vertices;
  return cell;
}

bool is_vertex_of(const ConvexCell& cell, const Vec& p, double tol) {
  for (const auto& v : cell.vertices) {
    if ((v - p).norm() <= tol) return true;
  }
  return false;
}

int find_goal_cell(const Environment& env) {
  if (env.goal_cell) {
    const ConvexCell& c = env.cell(*env.goal_cell);
    if (!is_vertex_of(c, env.goal, kContainTol)) {
      fail(ErrorKind::GoalNotVertex,
           "goal is not a vertex of cell " + std::to_string(c.id));
    }
    return c.id;
  }
  int best = -1;
  for (const auto& c : env.cells) {
    if (is_vertex_of(c, env.goal, kContainTol) && (best < 0 || c.id < best)) {
      best = c.id;
    }
  }
  if (best < 0) fail(ErrorKind::GoalNotVertex, "goal is not a vertex of any cell");
  return best;
}

int locate_cell(const Environment& env, const Vec& x, double tol) {
  int best = -1;
  for (const auto& c : env.cells) {
    if (contains_point(c, x, tol) && (best < 0 || c.id < best)) best = c.id;
  }
  return best;
}

void validate_environment(const Environment& env) {
  if (env.cells.empty()) fail(ErrorKind::ConfigError, "environment has no cells");
  for (const auto& c : env.cells) {
    if (c.body.dim() != env.dimension) {
      fail(ErrorKind::DimensionMismatch, "cell " + std::to_string(c.id));
    }
    for (int l : c.landmark_ids) {
      if (l < 0 || l >= static_cast<int>(env.landmarks.size())) {
        fail(ErrorKind::ConfigError, "cell " + std::to_string(c.id) +
                                         " references unknown landmark " +
                                         std::to_string(l));
      }
    }
  }
  for (size_t i = 0; i < env.cells.size(); ++i) {
    for (size_t j = i + 1; j < env.cells.size(); ++j) {
      if (env.cells[i].id == env.cells[j].id) {
        fail(ErrorKind::ConfigError, "duplicate cell id " +
                                         std::to_string(env.cells[i].id));
      }
    }
  }
  find_goal_cell(env);

  // Overlap sampling: points strictly inside one cell must not lie strictly
  // inside another.
  std::mt19937_64 rng(7);
  for (const auto& a : env.cells) {
    const auto samples = sample_interior(a, 64, rng);
    std::vector<Vec> probes = samples;
    Vec c = Vec::Zero(a.body.dim());
    for (const auto& v : a.vertices) c += v;
    c /= static_cast<double>(a.vertices.size());
    probes.push_back(c);
    for (const auto& v : a.vertices) probes.push_back(0.9 * v + 0.1 * c);
    for (const auto& b : env.cells) {
      if (b.id == a.id) continue;
      for (const auto& p : probes) {
        if (contains_point(a, p, -1e-9) && contains_point(b, p, -1e-9)) {
          std::ostringstream os;
          os << "cells " << a.id << " and " << b.id << " overlap";
          fail(ErrorKind::DegenerateInput, os.str());
        }
      }
    }
  }
}

std::vector<Vec> sample_interior(const ConvexCell& cell, int count,
                                 std::mt19937_64& rng) {
  const int d = cell.body.dim();
  Vec lo = cell.vertices.front();
  Vec hi = cell.vertices.front();
  for (const auto& v : cell.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Vec x(d);
    for (int q = 0; q < d; ++q) x(q) = lo(q) + (hi(q) - lo(q)) * unit(rng);
    if (contains_point(cell, x, 0.0)) out.push_back(x);
  }
  return out;
}

}  // namespace safe_field::geometry

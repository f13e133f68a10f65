#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "safe_field/errors.hpp"
#include "safe_field/geometry.hpp"

using namespace safe_field;
using namespace safe_field::geometry;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::vector<Vec> unit_square() { return {v2(0, 0), v2(1, 0), v2(1, 1), v2(0, 1)}; }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ConfigError;
}

// Random convex polygon: sorted angles on an ellipse, counterclockwise.
std::vector<Vec> random_polygon(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(0.0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> R(0.5, 2.0);
  std::vector<double> ang(n);
  while (true) {
    for (auto& a : ang) a = U(rng);
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + 2 * std::numbers::pi - ang.back();
    for (int i = 1; i < n; ++i) gap = std::min(gap, ang[i] - ang[i - 1]);
    if (gap > 0.05) break;
  }
  const double rx = R(rng), ry = R(rng), cx = R(rng), cy = R(rng);
  std::vector<Vec> p;
  for (double a : ang) p.push_back(v2(cx + rx * std::cos(a), cy + ry * std::sin(a)));
  return p;
}

}  // namespace

TEST(PolygonToHalfspaces, UnitSquareBottomRow) {
  const HalfspaceSet h = polygon_to_halfspaces(unit_square());
  ASSERT_EQ(h.rows(), 4);
  EXPECT_NEAR(h.normals(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(h.normals(0, 1), -1.0, 1e-15);
  EXPECT_NEAR(h.offsets(0), 0.0, 1e-15);
}

TEST(PolygonToHalfspaces, TriangleHypotenuse) {
  // Edge (2,0)->(0,2): outward normal (1,1)/sqrt2, offset -(1,1)/sqrt2 . (2,0).
  const HalfspaceSet h = polygon_to_halfspaces({v2(0, 0), v2(2, 0), v2(0, 2)});
  EXPECT_NEAR(h.normals(1, 0), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(h.normals(1, 1), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(h.offsets(1), -std::sqrt(2.0), 1e-15);
}

TEST(PolygonToHalfspaces, RowsTightOnTheirEdge) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_polygon(rng, 5);
    const HalfspaceSet h = polygon_to_halfspaces(p);
    for (int j = 0; j < h.rows(); ++j) {
      EXPECT_NEAR(h.evaluate(p[j])(j), 0.0, 1e-12);
      EXPECT_NEAR(h.evaluate(p[(j + 1) % 5])(j), 0.0, 1e-12);
      for (const Vec& v : p) EXPECT_LE(h.evaluate(v)(j), 1e-9);
    }
  }
}

TEST(PolygonToHalfspaces, ClockwiseRejected) {
  auto sq = unit_square();
  std::reverse(sq.begin(), sq.end());
  EXPECT_EQ(kind_of([&] { polygon_to_halfspaces(sq); }), ErrorKind::NonConvexInput);
}

TEST(PolygonToHalfspaces, CoincidentVerticesRejected) {
  EXPECT_EQ(kind_of([] { polygon_to_halfspaces({v2(0, 0), v2(0, 0), v2(1, 0), v2(0, 1)}); }),
            ErrorKind::DegenerateInput);
}

TEST(ContainsPoint, Examples) {
  const ConvexCell c = make_cell(0, unit_square(), {});
  EXPECT_TRUE(contains_point(c, v2(0.5, 0.5), 0.0));
  EXPECT_FALSE(contains_point(c, v2(1.5, 0.5), 0.0));
  EXPECT_TRUE(contains_point(c, v2(1 + 1e-10, 0.5), 1e-9));
}

TEST(ContainsPoint, ConvexCombinations) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const ConvexCell c = make_cell(t, random_polygon(rng, 6), {});
    for (int s = 0; s < 50; ++s) {
      Vec x = Vec::Zero(2);
      double total = 0.0;
      for (const Vec& v : c.vertices) {
        const double w = U(rng);
        x += w * v;
        total += w;
      }
      EXPECT_TRUE(contains_point(c, x / total, 1e-9));
    }
  }
}

TEST(CellVertices, SquareCorners) {
  const auto v = cell_vertices(polygon_to_halfspaces(unit_square()));
  ASSERT_EQ(v.size(), 4u);
  for (const Vec& c : unit_square()) {
    bool found = false;
    for (const Vec& x : v) found = found || (x - c).norm() < 1e-12;
    EXPECT_TRUE(found);
  }
}

TEST(CellVertices, RedundantRowIgnored) {
  HalfspaceSet h = polygon_to_halfspaces(unit_square());
  h.normals.conservativeResize(5, 2);
  h.offsets.conservativeResize(5);
  h.normals.row(4) << 1, 0;
  h.offsets(4) = -2;
  EXPECT_EQ(cell_vertices(h).size(), 4u);
}

TEST(CellVertices, UnboundedRejected) {
  HalfspaceSet h;
  h.normals.resize(2, 2);
  h.normals << -1, 0, 0, -1;
  h.offsets = Vec::Zero(2);
  EXPECT_EQ(kind_of([&] { cell_vertices(h); }), ErrorKind::UnboundedPolytope);
}

TEST(CellVertices, RoundTripRandomPolygons) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const int n = 3 + t % 6;
    const auto p = random_polygon(rng, n);
    const auto v = cell_vertices(polygon_to_halfspaces(p));
    ASSERT_EQ(v.size(), p.size());
    // Same cyclic order up to rotation.
    int shift = -1;
    for (int s = 0; s < n; ++s)
      if ((v[s] - p[0]).norm() < 1e-8) shift = s;
    ASSERT_GE(shift, 0);
    for (int i = 0; i < n; ++i) EXPECT_LT((v[(i + shift) % n] - p[i]).norm(), 1e-8);
  }
}

TEST(Environment, GoalAndLocate) {
  Environment env;
  env.cells.push_back(make_cell(0, unit_square(), {0}));
  env.cells.push_back(make_cell(1, {v2(1, 0), v2(2, 0), v2(2, 1), v2(1, 1)}, {0}));
  env.landmarks = {v2(1, 0.5)};
  env.start = v2(0.5, 0.5);
  env.goal = v2(2, 1);
  validate_environment(env);
  EXPECT_EQ(find_goal_cell(env), 1);
  EXPECT_EQ(locate_cell(env, v2(1.5, 0.2), 1e-9), 1);
  EXPECT_EQ(locate_cell(env, v2(1.0, 0.2), 1e-9), 0);
  EXPECT_EQ(locate_cell(env, v2(3, 3), 1e-9), -1);
  env.goal = v2(1.5, 1.5);
  EXPECT_EQ(kind_of([&] { validate_environment(env); }), ErrorKind::GoalNotVertex);
}

TEST(Environment, OverlapDetected) {
  Environment env;
  env.cells.push_back(make_cell(0, unit_square(), {0}));
  env.cells.push_back(make_cell(1, {v2(0.5, 0), v2(2, 0), v2(2, 1), v2(0.5, 1)}, {0}));
  env.landmarks = {v2(1, 0.5)};
  env.start = v2(0.2, 0.5);
  env.goal = v2(2, 1);
  EXPECT_THROW(validate_environment(env), Error);
}

TEST(ConvexCell, BarrierIsNormalDistance) {
  const ConvexCell c = make_cell(0, {v2(0, 0), v2(2, 0), v2(0, 2)}, {});
  const Vec x = v2(0.5, 0.25);
  EXPECT_NEAR(c.barrier(0, x), 0.25, 1e-15);
  EXPECT_NEAR(c.barrier(1, x), (2 - 0.75) / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c.barrier(2, x), 0.5, 1e-15);
}

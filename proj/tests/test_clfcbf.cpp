#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "safe_field/clfcbf.hpp"
#include "safe_field/geometry.hpp"

using namespace safe_field;
using namespace safe_field::clfcbf;
using measurement::build_expectation_kernel;
using measurement::make_grid;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

struct Fixture {
  measurement::ExpectationKernel kernel = build_expectation_kernel(make_grid(4, 2.0));
  GainBasis basis = build_gain_basis({"mean", "quadratic", "cosine"}, kernel);
  GainLayout layout{2, 2, 2, 3};
  std::vector<GainBasis> bases{basis, basis};
};

Vec random_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = N(rng);
  return v;
}

Vec random_pmf(std::mt19937_64& rng, int n) {
  Vec p = random_vec(rng, n).cwiseAbs();
  return p / p.sum();
}

// u = sum_L sum_m K_{L,m} R_m P_L + K_b, written out from the layout.
Vec control(const Fixture& f, const Vec& g, const std::vector<Vec>& P) {
  Vec u = Vec::Zero(2);
  for (int L = 0; L < 2; ++L)
    for (int m = 0; m < 3; ++m) {
      Mat K(2, 2);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) K(a, b) = g(f.layout.K(L, m, a, b));
      u += K * f.basis.maps[m] * P[L];
    }
  for (int a = 0; a < 2; ++a) u(a) += g(f.layout.Kb(a));
  return u;
}

}  // namespace

TEST(ClfRow, SingleIntegratorZeroGains) {
  Fixture f;
  const auto row = build_clf_row(v2(1, 0), Vec::Zero(2), single_integrator(2), 1.0,
                                 f.layout, f.bases);
  EXPECT_EQ(row.kind, RowKind::Clf);
  EXPECT_NEAR((row.c_x - v2(1, 0)).norm(), 0.0, 1e-15);
  Vec g = Vec::Zero(f.layout.size());
  g(f.layout.Kb(0)) = 0.7;
  EXPECT_DOUBLE_EQ(row.r.evaluate(g), 0.7);
  // c_p picks row 1 of K_P.
  g(f.layout.K(0, 0, 0, 1)) = 2.0;
  const Vec cp = concrete_cp(row, 0, g);
  EXPECT_LT((cp - 2.0 * f.basis.maps[0].row(1).transpose()).norm(), 1e-14);
  EXPECT_LT(concrete_cp(row, 1, g).norm(), 1e-15);
}

TEST(ClfRow, ZeroAlphaLeavesDriftTerm) {
  Fixture f;
  Dynamics dyn{Mat(2, 2), Mat::Identity(2, 2)};
  dyn.A << 0.5, 1.0, -2.0, 0.3;
  const Vec v = v2(0.6, 0.8);
  const auto row = build_clf_row(v, v2(3, 4), dyn, 0.0, f.layout, f.bases);
  EXPECT_LT((row.c_x - dyn.A.transpose() * v).norm(), 1e-15);
  EXPECT_NEAR(row.r.evaluate(Vec::Zero(f.layout.size())), 0.0, 1e-15);
}

TEST(ClfRow, ZeroGainsOnExitFace) {
  Fixture f;
  const Vec v = v2(-1, 0), o = v2(1, 0.5);
  const auto row = build_clf_row(v, o, single_integrator(2), 1.0, f.layout, f.bases);
  const Vec g = Vec::Zero(f.layout.size());
  std::mt19937_64 rng(1);
  const std::vector<Vec> P{random_pmf(rng, 16), random_pmf(rng, 16)};
  EXPECT_EQ(evaluate_row(row, g, v2(1, 0.2), P), 0.0);
  EXPECT_EQ(evaluate_row(row, g, v2(1, 0.9), P), 0.0);
}

TEST(ClfRow, DirectSubstitution) {
  Fixture f;
  std::mt19937_64 rng(7);
  Dynamics dyn{Mat(2, 2), Mat(2, 2)};
  dyn.A = Eigen::Map<Mat>(random_vec(rng, 4).data(), 2, 2);
  dyn.B = Eigen::Map<Mat>(random_vec(rng, 4).data(), 2, 2);
  const Vec v = random_vec(rng, 2).normalized();
  const Vec o = random_vec(rng, 2);
  const auto row = build_clf_row(v, o, dyn, 1.0, f.layout, f.bases);
  for (int t = 0; t < 10; ++t) {
    const Vec g = random_vec(rng, f.layout.size());
    const Vec x = random_vec(rng, 2);
    const std::vector<Vec> P{random_pmf(rng, 16), random_pmf(rng, 16)};
    const double direct = v.dot(dyn.A * x + dyn.B * control(f, g, P)) + v.dot(x - o);
    EXPECT_NEAR(evaluate_row(row, g, x, P), direct, 1e-10);
  }
}

TEST(CbfRows, FloorFacet) {
  Fixture f;
  Mat normals(1, 2);
  normals << 0, -1;
  const auto rows = build_cbf_rows(normals, Vec::Zero(1), {0}, single_integrator(2), 1.0,
                                   f.layout, f.bases);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].kind, RowKind::Cbf);
  EXPECT_NEAR((rows[0].c_x - v2(0, -1)).norm(), 0.0, 1e-15);
  Vec g = Vec::Zero(f.layout.size());
  g(f.layout.Kb(1)) = 0.25;
  EXPECT_DOUBLE_EQ(rows[0].r.evaluate(g), -0.25);
}

TEST(CbfRows, DirectSubstitution) {
  Fixture f;
  std::mt19937_64 rng(9);
  Dynamics dyn{Mat(2, 2), Mat(2, 2)};
  dyn.A = Eigen::Map<Mat>(random_vec(rng, 4).data(), 2, 2);
  dyn.B = Eigen::Map<Mat>(random_vec(rng, 4).data(), 2, 2);
  const auto cell = geometry::make_cell(
      0, {v2(0, 0), v2(2, 0), v2(2.5, 1), v2(1, 2), v2(-0.5, 1)}, {});
  const auto rows = build_cbf_rows(cell.body.normals, cell.body.offsets, {0, 2, 3, 4},
                                   dyn, 100.0, f.layout, f.bases);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) {
    const Vec a = cell.body.normals.row(row.index).transpose();
    const double b = cell.body.offsets(row.index);
    for (int t = 0; t < 10; ++t) {
      const Vec g = random_vec(rng, f.layout.size());
      const Vec x = random_vec(rng, 2);
      const std::vector<Vec> P{random_pmf(rng, 16), random_pmf(rng, 16)};
      // hdot + alpha h >= 0 with h = -(a x + b).
      const double hdot = -a.dot(dyn.A * x + dyn.B * control(f, g, P));
      const double h = cell.barrier(row.index, x);
      EXPECT_NEAR(evaluate_row(row, g, x, P), -(hdot + 100.0 * h), 1e-9);
    }
  }
}

TEST(CbfRows, ZeroGainsInsideIsNegative) {
  Fixture f;
  const auto cell = geometry::make_cell(0, {v2(0, 0), v2(1, 0), v2(1, 1), v2(0, 1)}, {});
  const auto rows = build_cbf_rows(cell.body.normals, cell.body.offsets, {0, 2, 3},
                                   single_integrator(2), 100.0, f.layout, f.bases);
  EXPECT_EQ(rows.size(), 3u);
  const Vec x = v2(0.3, 0.6);
  std::mt19937_64 rng(3);
  const std::vector<Vec> P{random_pmf(rng, 16), random_pmf(rng, 16)};
  for (const auto& row : rows) {
    const double val = evaluate_row(row, Vec::Zero(f.layout.size()), x, P);
    EXPECT_NEAR(val, -100.0 * cell.barrier(row.index, x), 1e-13);
    EXPECT_LT(val, 0.0);
  }
}

TEST(InputRows, BoxRows) {
  Fixture f;
  const auto rows = build_input_rows(0.2, f.layout, f.bases);
  ASSERT_EQ(rows.size(), 4u);
  Vec g = Vec::Zero(f.layout.size());
  g(f.layout.Kb(0)) = 0.5;
  g(f.layout.Kb(1)) = -0.1;
  std::mt19937_64 rng(5);
  const std::vector<Vec> P{random_pmf(rng, 16), random_pmf(rng, 16)};
  const double expect[4] = {0.3, -0.7, -0.3, -0.1};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(rows[i].kind, RowKind::Input);
    EXPECT_NEAR(evaluate_row(rows[i], g, v2(1, 1), P), expect[rows[i].index], 1e-15);
  }
}

TEST(EvaluateRow, AffineInEveryArgument) {
  Fixture f;
  std::mt19937_64 rng(11);
  const auto row = build_clf_row(v2(0.6, -0.8), v2(0.1, 0.2), single_integrator(2), 1.0,
                                 f.layout, f.bases);
  const Vec g0 = random_vec(rng, f.layout.size()), dg = random_vec(rng, f.layout.size());
  const Vec x0 = random_vec(rng, 2), dx = random_vec(rng, 2);
  const std::vector<Vec> P0{random_pmf(rng, 16), random_pmf(rng, 16)};
  const std::vector<Vec> dP{random_vec(rng, 16), random_vec(rng, 16)};
  const auto shifted = [&](double s) {
    return std::vector<Vec>{P0[0] + s * dP[0], P0[1] + s * dP[1]};
  };
  const auto second = [](double a, double b, double c) { return a - 2 * b + c; };
  EXPECT_LE(std::abs(second(evaluate_row(row, g0 - dg, x0, P0), evaluate_row(row, g0, x0, P0),
                            evaluate_row(row, g0 + dg, x0, P0))),
            1e-9);
  EXPECT_LE(std::abs(second(evaluate_row(row, g0, x0 - dx, P0), evaluate_row(row, g0, x0, P0),
                            evaluate_row(row, g0, x0 + dx, P0))),
            1e-9);
  EXPECT_LE(std::abs(second(evaluate_row(row, g0, x0, shifted(-1)),
                            evaluate_row(row, g0, x0, P0), evaluate_row(row, g0, x0, shifted(1)))),
            1e-9);
}

TEST(AffineInGains, MergeAndScale) {
  AffineInGains a;
  a.constant = 1.0;
  a.add(3, 2.0);
  a.add(1, 1.0);
  a.add(3, -0.5);
  a.normalize();
  ASSERT_EQ(a.terms.size(), 2u);
  EXPECT_EQ(a.terms[0].first, 1);
  EXPECT_DOUBLE_EQ(a.terms[1].second, 1.5);
  Vec g = Vec::Zero(4);
  g << 0, 2, 0, 4;
  EXPECT_DOUBLE_EQ((a * 2.0).evaluate(g), 2 * (1 + 2 + 6));
  AffineInGains b = a;
  b += a;
  EXPECT_DOUBLE_EQ(b.evaluate(g), 18.0);
}

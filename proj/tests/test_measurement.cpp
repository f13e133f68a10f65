#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "safe_field/errors.hpp"
#include "safe_field/measurement.hpp"

using namespace safe_field;
using namespace safe_field::measurement;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

PmfGrid random_pmf(const GridSpec& spec, std::mt19937_64& rng, double sparsity) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  PmfGrid p{spec, Vec::Zero(spec.points())};
  for (int i = 0; i < spec.points(); ++i)
    if (U(rng) < sparsity) p.mass(i) = U(rng);
  p.mass(static_cast<int>(rng() % spec.points())) += 0.1;
  p.mass /= p.mass.sum();
  return p;
}

// Physical coordinate of grid index g evaluated from the cell-centered formula.
Vec coordinate(const GridSpec& spec, int g) {
  const auto idx = spec.unravel(g);
  Vec c(spec.dim());
  for (int q = 0; q < spec.dim(); ++q)
    c(q) = spec.width[q] * (idx[q] + 0.5) / spec.n[q] - spec.width[q] / 2;
  return c;
}

}  // namespace

TEST(ExpectationKernel, TwoByTwoTheta) {
  const auto k = build_expectation_kernel(make_grid(2, 2.0));
  EXPECT_EQ(k.theta[0].size(), 2);
  EXPECT_DOUBLE_EQ(k.theta[0](0), -0.5);
  EXPECT_DOUBLE_EQ(k.theta[0](1), 0.5);
  EXPECT_EQ(k.U.rows(), 2);
  EXPECT_EQ(k.U.cols(), 4);
}

TEST(ExpectationKernel, SymmetricGridZeroMean) {
  const GridSpec spec = make_grid(5, 1.0);
  const auto k = build_expectation_kernel(spec);
  const PmfGrid center = make_delta_pmf(spec, Vec::Zero(2));
  EXPECT_NEAR((k.U * center.mass).norm(), 0.0, 1e-15);
  const Vec uniform = Vec::Constant(spec.points(), 1.0 / spec.points());
  EXPECT_NEAR((k.U * uniform).norm(), 0.0, 1e-15);
}

TEST(ExpectationKernel, DeltaConsistencyEveryIndex) {
  for (int n : {3, 4, 9}) {
    const GridSpec spec = make_grid(n, 0.3 * n);
    const auto k = build_expectation_kernel(spec);
    for (int g = 0; g < spec.points(); ++g) {
      const Vec c = coordinate(spec, g);
      const PmfGrid p = make_delta_pmf(spec, c);
      EXPECT_DOUBLE_EQ(p.mass(g), 1.0);
      EXPECT_EQ((k.U * p.mass - c).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(MakeDeltaPmf, SnapsToNearestCenter) {
  const GridSpec spec = make_grid(3, 3.0);
  const auto k = build_expectation_kernel(spec);
  const PmfGrid p = make_delta_pmf(spec, v2(0.4, 0.0));
  EXPECT_DOUBLE_EQ(p.mass(spec.ravel({1, 1})), 1.0);
  EXPECT_NEAR((k.U * p.mass).norm(), 0.0, 1e-15);
  const PmfGrid tie = make_delta_pmf(spec, v2(0.5, 0.0));
  EXPECT_DOUBLE_EQ(tie.mass(spec.ravel({1, 1})), 1.0);
}

TEST(MakeDeltaPmf, OutOfView) {
  const GridSpec spec = make_grid(4, 2.0);
  try {
    make_delta_pmf(spec, v2(1.1, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LandmarkOutOfView);
  }
}

TEST(BlurPmf, ZeroVarianceIsIdentity) {
  std::mt19937_64 rng(2);
  const GridSpec spec = make_grid(7, 7.0);
  const PmfGrid p = random_pmf(spec, rng, 0.5);
  const PmfGrid b = blur_pmf(p, Vec::Zero(2), 0.0);
  EXPECT_LT((b.mass - p.mass).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BlurPmf, DriftShiftsMean) {
  const GridSpec spec = make_grid(31, 31.0);
  const auto k = build_expectation_kernel(spec);
  const PmfGrid b = blur_pmf(make_delta_pmf(spec, Vec::Zero(2)), v2(3, 0), 12.0);
  const Vec mean = k.U * b.mass;
  EXPECT_LE(std::abs(mean(0) - 3.0), 1.0);
  EXPECT_LE(std::abs(mean(1)), 1.0);
  // Direct expectation over the discretized shifted Gaussian.
  double num = 0.0, den = 0.0;
  for (int i = -10; i <= 10; ++i) {
    const double w = std::exp(-0.5 * i * i / 12.0);
    num += (i + 3) * w;
    den += w;
  }
  EXPECT_NEAR(mean(0), num / den, 1e-9);
}

TEST(BlurPmf, NormalizationAndNonNegativity) {
  std::mt19937_64 rng(4);
  const GridSpec spec = make_grid(12, 1.2);
  for (int t = 0; t < 50; ++t) {
    const PmfGrid p = random_pmf(spec, rng, 0.3);
    std::uniform_real_distribution<double> D(-0.6, 0.6), V(0.0, 0.2);
    const PmfGrid b = blur_pmf(p, v2(D(rng), D(rng)), V(rng));
    EXPECT_NEAR(b.mass.sum(), 1.0, 1e-12);
    EXPECT_GE(b.mass.minCoeff(), 0.0);
  }
  const PmfGrid u{spec, Vec::Constant(spec.points(), 1.0 / spec.points())};
  EXPECT_NEAR(blur_pmf(u, v2(0.3, -0.2), 0.05).mass.sum(), 1.0, 1e-12);
}

TEST(CheckPmfFeasible, DeltaAtTruth) {
  const GridSpec spec = make_grid(10, 1.0);
  const auto k = build_expectation_kernel(spec);
  const Vec y = v2(0.13, -0.21);
  const auto r = check_pmf_feasible(make_delta_pmf(spec, y), k, {0.05, 0.05}, y);
  EXPECT_LE(r.mean_error.cwiseAbs().maxCoeff(), 0.05 + 1e-15);
  EXPECT_LE(r.mad.maxCoeff(), 0.05 + 1e-15);
  EXPECT_TRUE(r.feasible);
}

TEST(CheckPmfFeasible, TwoPointMad) {
  const GridSpec spec = make_grid(9, 9.0);
  const auto k = build_expectation_kernel(spec);
  PmfGrid p{spec, Vec::Zero(spec.points())};
  p.mass(spec.ravel({2, 4})) = 0.5;
  p.mass(spec.ravel({6, 4})) = 0.5;
  const auto r = check_pmf_feasible(p, k, {0.1, 2.0}, Vec::Zero(2));
  EXPECT_NEAR(r.mean_error.norm(), 0.0, 1e-15);
  EXPECT_NEAR(r.mad(0), 2.0, 1e-15);
  EXPECT_NEAR(r.mad(1), 0.0, 1e-15);
  EXPECT_TRUE(r.feasible);
  EXPECT_FALSE(check_pmf_feasible(p, k, {0.1, 1.9}, Vec::Zero(2)).feasible);
}

TEST(CheckPmfFeasible, CaseStudyBoundsOnBlurredPmfs) {
  const GridSpec spec = make_grid(30, 30.0);
  const auto k = build_expectation_kernel(spec);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> Y(-8.0, 8.0);
  for (int t = 0; t < 20; ++t) {
    const Vec y = v2(Y(rng), Y(rng));
    const PmfGrid b = blur_pmf(make_delta_pmf(spec, y), v2(3, 0), 12.0);
    EXPECT_TRUE(check_pmf_feasible(b, k, {4.0, 16.0}, y).feasible);
  }
}

TEST(ProbabilityBlocks, Shapes) {
  const auto k = build_expectation_kernel(make_grid(3, 3.0));
  const auto b = assemble_probability_constraints(k, {0.5, 0.5}, v2(1, 1));
  EXPECT_EQ(b.A_p.rows(), 4);
  EXPECT_EQ(b.A_p.cols(), 9);
  EXPECT_EQ(b.A_x.rows(), 4);
  EXPECT_EQ(b.A_x.cols(), 2);
  EXPECT_EQ(b.b_p.size(), 4);
}

TEST(ProbabilityBlocks, ZeroEpsilonPinsMean) {
  const GridSpec spec = make_grid(3, 3.0);
  const auto k = build_expectation_kernel(spec);
  const Vec l = v2(2, 1);
  const auto b = assemble_probability_constraints(k, {0.0, 5.0}, l);
  const Vec x = v2(2, 1);
  const PmfGrid center = make_delta_pmf(spec, Vec::Zero(2));
  const Vec res = b.A_x * x + b.A_p * center.mass + b.b_p;
  EXPECT_NEAR(res.cwiseAbs().maxCoeff(), 0.0, 1e-15);
  const PmfGrid off = make_delta_pmf(spec, v2(1, 0));
  EXPECT_GT((b.A_x * x + b.A_p * off.mass + b.b_p).maxCoeff(), 0.5);
}

TEST(ProbabilityBlocks, AgreesWithFeasibilityCheck) {
  std::mt19937_64 rng(13);
  const GridSpec spec = make_grid(6, 3.0);
  const auto k = build_expectation_kernel(spec);
  std::uniform_real_distribution<double> X(-1.0, 1.0);
  int feasible = 0;
  for (int t = 0; t < 400 && feasible < 5; ++t) {
    const Vec l = v2(X(rng), X(rng));
    const Vec x = v2(X(rng), X(rng)) * 0.3 + l;
    const PmfGrid p = random_pmf(spec, rng, 0.2);
    const UncertaintyBounds bounds{0.4, 0.9};
    const auto b = assemble_probability_constraints(k, bounds, l);
    const bool block_ok = b.evaluate(x, p.mass, b.minimal_z(x)).maxCoeff() <= 1e-12;
    const bool report_ok = check_pmf_feasible(p, k, bounds, l - x).feasible;
    EXPECT_EQ(block_ok, report_ok);
    feasible += report_ok;
  }
  EXPECT_GE(feasible, 5);
}

TEST(ProbabilityBlocks, MinimalZGivesMad) {
  std::mt19937_64 rng(17);
  const GridSpec spec = make_grid(8, 2.0);
  const auto k = build_expectation_kernel(spec);
  std::uniform_real_distribution<double> X(-0.9, 0.9);
  for (int t = 0; t < 500; ++t) {
    const Vec l = v2(X(rng), X(rng));
    const Vec x = v2(X(rng), X(rng)) * 0.2 + l;
    const PmfGrid p = random_pmf(spec, rng, 0.3);
    const auto b = assemble_probability_constraints(k, {1.0, 1.0}, l);
    const Mat z = b.minimal_z(x);
    const Vec y = l - x;
    for (int q = 0; q < 2; ++q) {
      double mad = 0.0;
      for (int i = 0; i < spec.points(); ++i) mad += std::abs(k.U(q, i) - y(q)) * p.mass(i);
      EXPECT_NEAR(z.row(q).dot(p.mass), mad, 1e-10);
    }
    // Every z row holds with equality on one side.
    const Vec res = b.evaluate(x, p.mass, z);
    EXPECT_LE(res.tail(res.size() - 4 - 2).maxCoeff(), 1e-15);
  }
}

TEST(PmfCsv, RoundTrip) {
  std::mt19937_64 rng(23);
  GridSpec spec{{4, 5}, {1.0, 2.5}};
  const PmfGrid p = random_pmf(spec, rng, 0.6);
  std::stringstream ss;
  write_pmf_csv(ss, p);
  const PmfGrid q = read_pmf_csv(ss);
  EXPECT_EQ(q.spec, p.spec);
  EXPECT_LT((q.mass - p.mass).cwiseAbs().maxCoeff(), 1e-15);
}

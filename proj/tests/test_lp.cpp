#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "safe_field/lp_core.hpp"

using namespace safe_field::lp;

namespace {

// Random LP with a known feasible point and finite bounds or box rows on every
// variable, so it is feasible and bounded.
StandardLp random_lp(std::mt19937_64& rng, int n, int m_ub, int m_eq) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  StandardLp lp;
  lp.sense = rng() % 2 ? Sense::Minimize : Sense::Maximize;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    const int kind = static_cast<int>(rng() % 4);
    double lo = -kInf, hi = kInf;
    if (kind == 0) lo = 0.0;
    if (kind == 1) hi = 0.0;
    if (kind == 2) {
      lo = -1.0 - U(rng);
      hi = 1.0 + U(rng);
    }
    x0[j] = kind == 0 ? U(rng) : kind == 1 ? -U(rng) : 0.5 * N(rng);
    lp.add_variable("x" + std::to_string(j), lo, hi, N(rng));
    if (kind != 2) {
      lp.add_ub("box_hi" + std::to_string(j), {{j, 1.0}}, 5.0);
      lp.add_ub("box_lo" + std::to_string(j), {{j, -1.0}}, 5.0);
    }
  }
  for (int r = 0; r < m_ub + m_eq; ++r) {
    std::vector<std::pair<int, double>> terms;
    double ax = 0.0;
    for (int j = 0; j < n; ++j)
      if (U(rng) < 0.6) {
        const double a = N(rng);
        terms.emplace_back(j, a);
        ax += a * x0[j];
      }
    if (r < m_ub)
      lp.add_ub("r" + std::to_string(r), terms, ax + U(rng));
    else
      lp.add_eq("e" + std::to_string(r), terms, ax);
  }
  return lp;
}

}  // namespace

TEST(SolveLp, SingleVariableMax) {
  StandardLp lp;
  lp.sense = Sense::Maximize;
  lp.add_variable("x", 0.0, kInf, 1.0);
  lp.add_ub("cap", {{0, 1.0}}, 3.0);
  const auto s = solve_lp(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.x[0], 3.0, 1e-12);
  EXPECT_NEAR(s.objective, 3.0, 1e-12);
  EXPECT_NEAR(s.ub_duals[0], 1.0, 1e-12);
}

TEST(SolveLp, Infeasible) {
  StandardLp lp;
  lp.add_variable("x", 0.0, kInf, 0.0);
  lp.add_ub("neg", {{0, 1.0}}, -1.0);
  EXPECT_EQ(solve_lp(lp).status, Status::Infeasible);
}

TEST(SolveLp, DegenerateOptimumObjective) {
  StandardLp lp;
  lp.sense = Sense::Maximize;
  lp.add_variable("x", 0.0, kInf, 1.0);
  lp.add_variable("y", 0.0, kInf, 1.0);
  lp.add_ub("sum", {{0, 1.0}, {1, 1.0}}, 1.0);
  const auto s = solve_lp(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

TEST(SolveLp, Unbounded) {
  StandardLp lp;
  lp.sense = Sense::Maximize;
  lp.add_variable("x", 0.0, kInf, 1.0);
  lp.add_variable("y", -kInf, kInf, 0.0);
  lp.add_ub("r", {{0, 1.0}, {1, -1.0}}, 0.0);
  EXPECT_EQ(solve_lp(lp).status, Status::Unbounded);
}

TEST(Dualize, CanonicalPair) {
  StandardLp lp;
  lp.sense = Sense::Maximize;
  lp.add_variable("x0", 0.0, kInf, 3.0);
  lp.add_variable("x1", 0.0, kInf, 2.0);
  lp.add_ub("a", {{0, 1.0}, {1, 1.0}}, 4.0);
  lp.add_ub("b", {{0, 1.0}, {1, 3.0}}, 6.0);
  const auto d = dualize(lp);
  EXPECT_EQ(d.lp.sense, Sense::Minimize);
  ASSERT_EQ(d.lp.num_vars(), 2);
  EXPECT_EQ(d.lp.names[0], "dual[a]");
  EXPECT_EQ(d.lp.lower[0], 0.0);
  EXPECT_EQ(d.lp.cost[0], 4.0);
  EXPECT_EQ(d.lp.cost[1], 6.0);
  // A^T y >= c written as -A^T y <= -c.
  ASSERT_EQ(d.lp.ub.size(), 2u);
  EXPECT_EQ(d.lp.ub[0].rhs, -3.0);
  EXPECT_EQ(d.lp.ub[0].terms[1].second, -1.0);
  EXPECT_EQ(d.lp.ub[1].terms[1].second, -3.0);
  EXPECT_NEAR(solve_lp(d.lp).objective, solve_lp(lp).objective, 1e-12);
}

TEST(Dualize, StrongDualityRandom) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng() % 8);
    const StandardLp lp = random_lp(rng, n, 1 + static_cast<int>(rng() % 8),
                                    static_cast<int>(rng() % 3));
    const auto p = solve_lp(lp);
    ASSERT_EQ(p.status, Status::Optimal) << "instance " << t;
    EXPECT_LE(primal_residual(lp, p.x).rows, 1e-7);
    EXPECT_LE(primal_residual(lp, p.x).bounds, 1e-7);
    EXPECT_LE(complementary_slackness(lp, p), 1e-6);
    const auto d = solve_lp(dualize(lp).lp);
    ASSERT_EQ(d.status, Status::Optimal) << "instance " << t;
    EXPECT_NEAR(p.objective, d.objective, 1e-6) << "instance " << t;
    const auto dd = solve_lp(dualize(dualize(lp).lp).lp);
    ASSERT_EQ(dd.status, Status::Optimal);
    EXPECT_NEAR(dd.objective, p.objective, 1e-6);
  }
}

TEST(Dualize, WeakDualityAtFeasiblePoints) {
  // Any dual-feasible point bounds the primal optimum.
  std::mt19937_64 rng(37);
  for (int t = 0; t < 30; ++t) {
    const StandardLp lp = random_lp(rng, 4, 4, 1);
    const auto p = solve_lp(lp);
    ASSERT_EQ(p.status, Status::Optimal);
    auto d = dualize(lp).lp;
    d.sense = d.sense == Sense::Minimize ? Sense::Maximize : Sense::Minimize;
    // Worst dual-feasible point still lies on the correct side.
    for (int j = 0; j < d.num_vars(); ++j) {
      if (std::isinf(d.lower[j])) d.lower[j] = -1e3;
      if (std::isinf(d.upper[j])) d.upper[j] = 1e3;
    }
    const auto worst = solve_lp(d);
    ASSERT_EQ(worst.status, Status::Optimal);
    if (lp.sense == Sense::Maximize)
      EXPECT_GE(worst.objective, p.objective - 1e-7);
    else
      EXPECT_LE(worst.objective, p.objective + 1e-7);
  }
}

TEST(Dualize, InfeasiblePrimalUnboundedDual) {
  StandardLp lp;
  lp.add_variable("x", 0.0, kInf, 0.0);
  lp.add_ub("neg", {{0, 1.0}}, -1.0);
  EXPECT_EQ(solve_lp(lp).status, Status::Infeasible);
  EXPECT_EQ(solve_lp(dualize(lp).lp).status, Status::Unbounded);

  StandardLp up;
  up.sense = Sense::Maximize;
  up.add_variable("x", 0.0, kInf, 1.0);
  up.add_ub("r", {{0, -1.0}}, 0.0);
  EXPECT_EQ(solve_lp(up).status, Status::Unbounded);
  EXPECT_EQ(solve_lp(dualize(up).lp).status, Status::Infeasible);
}

TEST(SolveLp, ShadowPricesMatchFiniteDifference) {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    StandardLp lp = random_lp(rng, 5, 6, 1);
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, Status::Optimal);
    const double h = 1e-6;
    for (size_t r = 0; r < lp.ub.size(); ++r) {
      StandardLp q = lp;
      q.ub[r].rhs += h;
      const auto s2 = solve_lp(q);
      StandardLp q2 = lp;
      q2.ub[r].rhs -= h;
      const auto s3 = solve_lp(q2);
      const double fwd = (s2.objective - s.objective) / h;
      const double bwd = (s.objective - s3.objective) / h;
      // Degenerate rows have one-sided derivatives; the dual lies between them.
      if (std::abs(fwd - bwd) < 1e-6) {
        EXPECT_NEAR(s.ub_duals[r], fwd, 1e-4);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(SolveLp, Deterministic) {
  std::mt19937_64 rng(43);
  const StandardLp lp = random_lp(rng, 12, 10, 3);
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.ub_duals, b.ub_duals);
}

TEST(SolveLp, TallProgramThroughDual) {
  std::mt19937_64 rng(47);
  const StandardLp lp = random_lp(rng, 4, 300, 0);
  SolverOptions direct;
  direct.allow_dual_route = false;
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp, direct);
  ASSERT_EQ(a.status, Status::Optimal);
  ASSERT_EQ(b.status, Status::Optimal);
  EXPECT_NEAR(a.objective, b.objective, 1e-7);
  EXPECT_LE(primal_residual(lp, a.x).rows, 1e-7);
  EXPECT_LE(complementary_slackness(lp, a), 1e-6);
}

TEST(LpDump, StableListing) {
  std::mt19937_64 rng(53);
  const StandardLp lp = random_lp(rng, 3, 2, 1);
  std::ostringstream a, b;
  write_lp_dump(a, lp, {"test"});
  write_lp_dump(b, lp, {"test"});
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("x2"), std::string::npos);
  EXPECT_NE(a.str().find("e2"), std::string::npos);
}

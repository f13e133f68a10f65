#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "safe_field/errors.hpp"

namespace safe_field::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Minimize, Maximize };

template <class T>
struct LpRow {
  std::string name;
  std::vector<std::pair<int, T>> terms;
  T rhs{};
};

// Rows are either sum(terms) <= rhs (ub) or sum(terms) == rhs (eq). The
// coefficient type is a template so symbolic coefficients can be dualized.
template <class T>
struct BasicLp {
  Sense sense = Sense::Minimize;
  std::vector<std::string> names;
  std::vector<T> cost;
  T cost_offset{};
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpRow<T>> ub;
  std::vector<LpRow<T>> eq;

  int num_vars() const { return static_cast<int>(names.size()); }
  int num_rows() const { return static_cast<int>(ub.size() + eq.size()); }

  int add_variable(const std::string& name, double lo, double hi, T c = T{}) {
    if (index_.count(name)) fail(ErrorKind::DimensionMismatch, "duplicate LP variable " + name);
    const int id = num_vars();
    index_.emplace(name, id);
    names.push_back(name);
    cost.push_back(std::move(c));
    lower.push_back(lo);
    upper.push_back(hi);
    return id;
  }
  void add_ub(std::string name, std::vector<std::pair<int, T>> terms, T rhs) {
    ub.push_back({std::move(name), std::move(terms), std::move(rhs)});
  }
  void add_eq(std::string name, std::vector<std::pair<int, T>> terms, T rhs) {
    eq.push_back({std::move(name), std::move(terms), std::move(rhs)});
  }
  int find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }
  int at(const std::string& name) const {
    const int i = find(name);
    if (i < 0) fail(ErrorKind::DimensionMismatch, "no LP variable " + name);
    return i;
  }

 private:
  std::unordered_map<std::string, int> index_;
};

using StandardLp = BasicLp<double>;

enum class Status { Optimal, Infeasible, Unbounded };
const char* to_string(Status s);

struct LpSolution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  // Shadow prices d(objective)/d(rhs) in the LP's own sense.
  std::vector<double> ub_duals;
  std::vector<double> eq_duals;
  // c_j - sum_r a_rj dual_r.
  std::vector<double> reduced_costs;
  double objective = 0.0;
  long iterations = 0;
  bool via_dual = false;
};

struct SolverOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_every = 64;
  // Degenerate streaks first switch pricing to randomized Dantzig, then shift
  // the bounds of degenerate basic variables, then fall back to Bland's rule.
  int degenerate_before_random = 40;
  int degenerate_before_perturb = 200;
  double perturbation = 1e-7;
  int degenerate_before_bland = 20000;
  unsigned seed = 12345;
  long max_iterations = 0;  // 0 selects a size-based cap
  bool allow_dual_route = true;
};

LpSolution solve_lp(const StandardLp& lp, const SolverOptions& opts = {});

// Residuals of an assignment: worst row violation and worst bound violation.
struct Residual {
  double rows = 0.0;
  double bounds = 0.0;
  std::string worst_row;
};
Residual primal_residual(const StandardLp& lp, const std::vector<double>& x);
double objective_value(const StandardLp& lp, const std::vector<double>& x);

// Complementary slackness residual of an optimal solution.
double complementary_slackness(const StandardLp& lp, const LpSolution& s);

template <class T>
struct Dualized {
  BasicLp<T> lp;
  std::vector<int> ub_var;            // primal ub row -> dual variable
  std::vector<int> eq_var;            // primal eq row -> dual variable
  std::vector<int> bound_var;         // extra bound rows -> dual variable
  std::vector<int> var_row;           // primal variable -> dual row index
  std::vector<char> var_row_is_eq;    // that row lives in lp.eq
  std::vector<double> var_row_sign;   // dual row rhs = sign * c_j
};

// Textbook dual. Finite nonzero bounds become rows first. Sign classes:
// lower == 0 -> x >= 0, else upper == 0 -> x <= 0, else free.
template <class T>
Dualized<T> dualize(const BasicLp<T>& p) {
  Dualized<T> out;
  const bool primal_max = p.sense == Sense::Maximize;
  const int n = p.num_vars();

  std::vector<LpRow<T>> bound_rows;
  std::vector<int> sign_class(n);  // +1 nonneg, 0 free, -1 nonpos
  for (int j = 0; j < n; ++j) {
    const double lo = p.lower[j], hi = p.upper[j];
    if (lo == 0.0) {
      sign_class[j] = 1;
      if (std::isfinite(hi)) bound_rows.push_back({"ub:" + p.names[j], {{j, T(1.0)}}, T(hi)});
    } else if (hi == 0.0) {
      sign_class[j] = -1;
      if (std::isfinite(lo)) bound_rows.push_back({"lb:" + p.names[j], {{j, T(-1.0)}}, T(-lo)});
    } else {
      sign_class[j] = 0;
      if (std::isfinite(lo)) bound_rows.push_back({"lb:" + p.names[j], {{j, T(-1.0)}}, T(-lo)});
      if (std::isfinite(hi)) bound_rows.push_back({"ub:" + p.names[j], {{j, T(1.0)}}, T(hi)});
    }
  }

  BasicLp<T>& d = out.lp;
  d.sense = primal_max ? Sense::Minimize : Sense::Maximize;
  d.cost_offset = p.cost_offset;
  const double ylo = primal_max ? 0.0 : -kInf;
  const double yhi = primal_max ? kInf : 0.0;
  std::vector<std::vector<std::pair<int, T>>> cols(n);
  auto add_ub_rows = [&](const std::vector<LpRow<T>>& rows, std::vector<int>& map) {
    for (const auto& r : rows) {
      const int y = d.add_variable("dual[" + r.name + "]", ylo, yhi, r.rhs);
      map.push_back(y);
      for (const auto& [j, a] : r.terms) cols[j].emplace_back(y, a);
    }
  };
  add_ub_rows(p.ub, out.ub_var);
  add_ub_rows(bound_rows, out.bound_var);
  for (const auto& r : p.eq) {
    const int mu = d.add_variable("dual[" + r.name + "]", -kInf, kInf, r.rhs);
    out.eq_var.push_back(mu);
    for (const auto& [j, a] : r.terms) cols[j].emplace_back(mu, a);
  }

  out.var_row.resize(n);
  out.var_row_is_eq.resize(n);
  out.var_row_sign.resize(n);
  for (int j = 0; j < n; ++j) {
    const std::string name = "col[" + p.names[j] + "]";
    if (sign_class[j] == 0) {
      out.var_row[j] = static_cast<int>(d.eq.size());
      out.var_row_is_eq[j] = 1;
      out.var_row_sign[j] = 1.0;
      d.add_eq(name, cols[j], p.cost[j]);
      continue;
    }
    // Max primal: nonneg -> (A^T y)_j >= c_j. Min primal: nonneg -> <= c_j.
    const bool geq = (sign_class[j] == 1) == primal_max;
    out.var_row[j] = static_cast<int>(d.ub.size());
    out.var_row_is_eq[j] = 0;
    if (geq) {
      std::vector<std::pair<int, T>> neg;
      neg.reserve(cols[j].size());
      for (const auto& [k, a] : cols[j]) neg.emplace_back(k, -a);
      out.var_row_sign[j] = -1.0;
      d.add_ub(name, std::move(neg), -p.cost[j]);
    } else {
      out.var_row_sign[j] = 1.0;
      d.add_ub(name, cols[j], p.cost[j]);
    }
  }
  return out;
}

// Plain-text listing with stable ordering.
void write_lp_dump(std::ostream& os, const StandardLp& lp,
                   const std::vector<std::string>& header = {});

}  // namespace safe_field::lp

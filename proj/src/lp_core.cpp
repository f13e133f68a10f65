#include "safe_field/lp_core.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace safe_field::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

Residual primal_residual(const StandardLp& lp, const std::vector<double>& x) {
  Residual r;
  auto row_value = [&](const LpRow<double>& row) {
    double s = 0.0;
    for (const auto& [j, a] : row.terms) s += a * x[j];
    return s;
  };
  for (const auto& row : lp.ub) {
    const double v = row_value(row) - row.rhs;
    if (v > r.rows) {
      r.rows = v;
      r.worst_row = row.name;
    }
  }
  for (const auto& row : lp.eq) {
    const double v = std::abs(row_value(row) - row.rhs);
    if (v > r.rows) {
      r.rows = v;
      r.worst_row = row.name;
    }
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    r.bounds = std::max({r.bounds, lp.lower[j] - x[j], x[j] - lp.upper[j]});
  }
  return r;
}

double objective_value(const StandardLp& lp, const std::vector<double>& x) {
  double s = lp.cost_offset;
  for (int j = 0; j < lp.num_vars(); ++j) s += lp.cost[j] * x[j];
  return s;
}

double complementary_slackness(const StandardLp& lp, const LpSolution& s) {
  double worst = 0.0;
  for (size_t i = 0; i < lp.ub.size(); ++i) {
    double v = 0.0;
    for (const auto& [j, a] : lp.ub[i].terms) v += a * s.x[j];
    worst = std::max(worst, std::abs(s.ub_duals[i] * (lp.ub[i].rhs - v)));
  }
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double d = s.reduced_costs[j];
    double gap = kInf;
    if (std::isfinite(lp.lower[j])) gap = std::min(gap, std::abs(s.x[j] - lp.lower[j]));
    if (std::isfinite(lp.upper[j])) gap = std::min(gap, std::abs(lp.upper[j] - s.x[j]));
    if (!std::isfinite(gap)) gap = 1.0;  // free variables need d = 0
    worst = std::max(worst, std::abs(d) * gap);
  }
  return worst;
}

void write_lp_dump(std::ostream& os, const StandardLp& lp,
                   const std::vector<std::string>& header) {
  os << std::setprecision(17);
  for (const auto& h : header) os << "# " << h << '\n';
  os << "# variables " << lp.num_vars() << " ub_rows " << lp.ub.size() << " eq_rows "
     << lp.eq.size() << '\n';
  os << (lp.sense == Sense::Maximize ? "maximize" : "minimize") << '\n';
  os << "  obj:";
  if (lp.cost_offset != 0.0) os << ' ' << lp.cost_offset;
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.cost[j] != 0.0) os << " + " << lp.cost[j] << ' ' << lp.names[j];
  }
  os << "\nsubject to\n";
  auto row = [&](const LpRow<double>& r, const char* op) {
    os << "  " << r.name << ':';
    for (const auto& [j, a] : r.terms) os << " + " << a << ' ' << lp.names[j];
    os << ' ' << op << ' ' << r.rhs << '\n';
  };
  for (const auto& r : lp.ub) row(r, "<=");
  for (const auto& r : lp.eq) row(r, "=");
  os << "bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    os << "  " << lp.lower[j] << " <= " << lp.names[j] << " <= " << lp.upper[j] << '\n';
  }
  os << "end\n";
}

}  // namespace safe_field::lp

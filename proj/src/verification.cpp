#include "safe_field/verification.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace safe_field::verification {

using nlohmann::ordered_json;

namespace {

std::string idx(const std::string& base, int i) {
  return base + "[" + std::to_string(i) + "]";
}

}  // namespace

AdversaryResult adversarial_pmf(const Vec& c_p, const Vec& x,
                                const measurement::ExpectationKernel& kernel,
                                const measurement::UncertaintyBounds& bounds,
                                const Vec& landmark) {
  const measurement::ProbabilityBlocks blk =
      measurement::assemble_probability_constraints(kernel, bounds, landmark);
  const int np = kernel.spec.points();
  const int d = kernel.spec.dim();
  if (c_p.size() != np || x.size() != d) fail(ErrorKind::DimensionMismatch, "adversary sizes");
  lp::StandardLp lp;
  lp.sense = lp::Sense::Maximize;
  for (int i = 0; i < np; ++i) lp.add_variable(idx("P", i), 0.0, lp::kInf, c_p(i));
  std::vector<std::pair<int, double>> sum;
  for (int i = 0; i < np; ++i) sum.emplace_back(i, 1.0);
  lp.add_eq("simplex", std::move(sum), 1.0);
  const Vec rhs = -blk.A_x * x - blk.b_p;
  for (int r = 0; r < 2 * d; ++r) {
    std::vector<std::pair<int, double>> t;
    for (int i = 0; i < np; ++i)
      if (blk.A_p(r, i) != 0.0) t.emplace_back(i, blk.A_p(r, i));
    lp.add_ub(idx("mean", r), std::move(t), rhs(r));
  }
  const Eigen::MatrixXd z = blk.minimal_z(x);
  for (int q = 0; q < d; ++q) {
    std::vector<std::pair<int, double>> t;
    for (int i = 0; i < np; ++i)
      if (z(q, i) != 0.0) t.emplace_back(i, z(q, i));
    lp.add_ub(idx("mad", q), std::move(t), bounds.sigma_m);
  }
  lp::SolverOptions opts;
  opts.allow_dual_route = false;
  const lp::LpSolution sol = lp::solve_lp(lp, opts);
  if (sol.status != lp::Status::Optimal) {
    std::ostringstream os;
    os << "no PMF is consistent with the bounds at x = (" << x.transpose() << ")";
    fail(ErrorKind::InfeasibleMeasurementSet, os.str());
  }
  AdversaryResult res;
  res.x = x;
  res.inner_value = sol.objective;
  res.worst_pmf.spec = kernel.spec;
  res.worst_pmf.mass = Eigen::Map<const Vec>(sol.x.data(), np);
  double dual = sol.eq_duals[0];
  for (size_t r = 0; r < lp.ub.size(); ++r) dual += lp.ub[r].rhs * sol.ub_duals[r];
  res.dual_value = dual;
  return res;
}

double inner_dual_value(const Vec& c_p, const Vec& x,
                        const measurement::ExpectationKernel& kernel,
                        const measurement::UncertaintyBounds& bounds,
                        const Vec& landmark) {
  const measurement::ProbabilityBlocks blk =
      measurement::assemble_probability_constraints(kernel, bounds, landmark);
  const int np = kernel.spec.points();
  const int d = kernel.spec.dim();
  const Vec rhs = -blk.A_x * x - blk.b_p;
  const Eigen::MatrixXd z = blk.minimal_z(x);
  lp::StandardLp lp;
  lp.sense = lp::Sense::Minimize;
  for (int r = 0; r < 2 * d; ++r) lp.add_variable(idx("lambda_p", r), 0.0, lp::kInf, rhs(r));
  const int s = lp.add_variable("lambda_s", -lp::kInf, lp::kInf, 1.0);
  for (int q = 0; q < d; ++q) lp.add_variable(idx("lambda_z", q), 0.0, lp::kInf, bounds.sigma_m);
  for (int i = 0; i < np; ++i) {
    std::vector<std::pair<int, double>> t;
    for (int r = 0; r < 2 * d; ++r)
      if (blk.A_p(r, i) != 0.0) t.emplace_back(r, -blk.A_p(r, i));
    t.emplace_back(s, -1.0);
    for (int q = 0; q < d; ++q)
      if (z(q, i) != 0.0) t.emplace_back(s + 1 + q, -z(q, i));
    lp.add_ub(idx("grid", i), std::move(t), -c_p(i));
  }
  const lp::LpSolution sol = lp::solve_lp(lp);
  if (sol.status != lp::Status::Optimal) {
    fail(ErrorKind::InfeasibleMeasurementSet, "inner dual is not optimal");
  }
  return sol.objective;
}

std::vector<clfcbf::ConstraintRow> controller_rows(const synthesis::CellController& c,
                                                   const geometry::ConvexCell& cell,
                                                   const clfcbf::Dynamics& dyn) {
  const measurement::ExpectationKernel kernel = measurement::build_expectation_kernel(c.grid);
  std::vector<clfcbf::GainBasis> basis(c.landmarks.size(),
                                       clfcbf::build_gain_basis(c.basis_names, kernel));
  std::vector<clfcbf::ConstraintRow> rows;
  rows.push_back(clfcbf::build_clf_row(c.exit.v, c.exit.o, dyn, c.alpha_v, c.gains.layout, basis));
  for (auto& r : clfcbf::build_cbf_rows(cell.body.normals, cell.body.offsets, c.exit.barrier_rows,
                                        dyn, c.alpha_h, c.gains.layout, basis)) {
    rows.push_back(std::move(r));
  }
  if (c.u_max) {
    for (auto& r : clfcbf::build_input_rows(*c.u_max, c.gains.layout, basis)) rows.push_back(std::move(r));
  }
  if (rows.size() != c.margins.size()) {
    fail(ErrorKind::DimensionMismatch, "controller rows disagree with stored margins");
  }
  return rows;
}

double robust_row_value(const clfcbf::ConstraintRow& row, const synthesis::CellController& c,
                        const measurement::ExpectationKernel& kernel, const Vec& x) {
  double v = row.c_x.dot(x) + row.r.evaluate(c.gains.values);
  for (size_t L = 0; L < c.landmarks.size(); ++L) {
    const Vec cp = clfcbf::concrete_cp(row, static_cast<int>(L), c.gains.values);
    v += adversarial_pmf(cp, x, kernel, c.bounds, c.landmarks[L]).inner_value;
  }
  return v;
}

VerificationReport verify_controller(const synthesis::CellController& c,
                                     const geometry::ConvexCell& cell,
                                     const SamplingConfig& sampling,
                                     const clfcbf::Dynamics& dyn) {
  const measurement::ExpectationKernel kernel = measurement::build_expectation_kernel(c.grid);
  const auto rows = controller_rows(c, cell, dyn);
  std::mt19937_64 rng(sampling.seed + static_cast<std::uint64_t>(c.cell_id));
  std::vector<Vec> xs = cell.vertices;
  for (auto& p : geometry::sample_interior(cell, sampling.count, rng)) xs.push_back(std::move(p));

  VerificationReport rep;
  rep.cell_id = c.cell_id;
  rep.samples = static_cast<int>(xs.size());
  rep.seed = sampling.seed;
  for (size_t k = 0; k < rows.size(); ++k) {
    RowReport rr;
    rr.label = rows[k].label();
    rr.delta = c.margins[k];
    rr.max_slack = -lp::kInf;
    for (const Vec& x : xs) {
      const double s = robust_row_value(rows[k], c, kernel, x) + rr.delta;
      if (s > rr.max_slack) {
        rr.max_slack = s;
        rr.worst_x = x;
      }
    }
    rr.pass = rr.max_slack <= kSlackTol;
    rep.pass = rep.pass && rr.pass;
    rep.rows.push_back(std::move(rr));
  }
  return rep;
}

void require_pass(const VerificationReport& r) {
  if (r.pass) return;
  const auto worst = std::max_element(r.rows.begin(), r.rows.end(), [](const auto& a, const auto& b) {
    return a.max_slack < b.max_slack;
  });
  std::ostringstream os;
  os << "cell " << r.cell_id << " row " << worst->label << " violated by " << worst->max_slack
     << " at x = (" << worst->worst_x.transpose() << ")";
  fail(ErrorKind::VerificationFailed, os.str());
}

ordered_json report_to_json(const std::vector<VerificationReport>& rs) {
  ordered_json j;
  bool pass = true;
  ordered_json cells = ordered_json::array();
  for (const auto& r : rs) {
    ordered_json c;
    c["id"] = r.cell_id;
    c["pass"] = r.pass;
    c["samples"] = r.samples;
    c["seed"] = r.seed;
    ordered_json rows = ordered_json::array();
    for (const auto& rr : r.rows) {
      ordered_json o;
      o["row"] = rr.label;
      o["delta"] = rr.delta;
      o["max_slack"] = rr.max_slack;
      o["worst_x"] = std::vector<double>(rr.worst_x.data(), rr.worst_x.data() + rr.worst_x.size());
      o["pass"] = rr.pass;
      rows.push_back(o);
    }
    c["rows"] = rows;
    cells.push_back(c);
    pass = pass && r.pass;
  }
  j["pass"] = pass;
  j["tolerance"] = kSlackTol;
  j["cells"] = cells;
  return j;
}

}  // namespace safe_field::verification

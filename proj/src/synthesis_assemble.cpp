#include <string>

#include "synthesis_internal.hpp"

namespace safe_field::synthesis {

namespace {

std::string idx(const std::string& base, std::initializer_list<int> ids) {
  std::string s = base;
  for (int i : ids) s += "[" + std::to_string(i) + "]";
  return s;
}

std::pair<double, double> margin_bounds(MarginKind m) {
  switch (m) {
    case MarginKind::NonNegative: return {0.0, lp::kInf};
    case MarginKind::Free: return {-lp::kInf, lp::kInf};
    case MarginKind::Zero: return {0.0, 0.0};
  }
  return {0.0, lp::kInf};
}

}  // namespace

void add_gain_variables(lp::StandardLp& lp, const clfcbf::GainLayout& g) {
  for (int L = 0; L < g.n_landmarks; ++L)
    for (int m = 0; m < g.n_maps; ++m)
      for (int a = 0; a < g.n_u; ++a)
        for (int b = 0; b < g.d; ++b) {
          const int id = lp.add_variable(idx("K", {L, m, a, b}), -lp::kInf, lp::kInf);
          if (id != g.K(L, m, a, b)) fail(ErrorKind::DimensionMismatch, "gain layout");
        }
  for (int a = 0; a < g.n_u; ++a) lp.add_variable(idx("Kb", {a}), -lp::kInf, lp::kInf);
}

int add_margin_variable(lp::StandardLp& lp, const CellProblem& p, int k) {
  const auto [lo, hi] = margin_bounds(p.margin[k]);
  return lp.add_variable(idx("delta", {k}), lo, hi,
                         p.margin[k] == MarginKind::Zero ? 0.0 : p.omega[k]);
}

void append_affine(std::vector<std::pair<int, double>>& terms,
                   const clfcbf::AffineInGains& e, double scale) {
  for (const auto& [i, c] : e.terms) terms.emplace_back(i, scale * c);
}

LpDimensions expected_dimensions(const CellProblem& p) {
  const int d = p.cell.body.dim();
  const int nc = p.cell.body.rows();
  const int nl = static_cast<int>(p.landmarks.size());
  const int K = static_cast<int>(p.rows.size());
  LpDimensions dim;
  dim.variables = p.layout.size();
  dim.ub_rows = 0;
  dim.eq_rows = p.goal_pmfs ? p.layout.n_u : 0;
  for (int k = 0; k < K; ++k) {
    int vars = 1 + nc;
    int eqs = d;
    for (int L = 0; L < nl; ++L) {
      const int np = p.kernels[L].spec.points();
      vars += 2 * d + 1 + d + 2 * d * np + np * nc + 2 * d * np;
      eqs += 3 * d * np;
      dim.ub_rows += np;
    }
    dim.ub_rows += 1;
    dim.variables += vars;
    dim.eq_rows += eqs;
  }
  return dim;
}

AssembledLp assemble_robust_lp(const CellProblem& p) {
  AssembledLp out;
  lp::StandardLp& lp = out.lp;
  lp.sense = lp::Sense::Maximize;
  const int d = p.cell.body.dim();
  const int nc = p.cell.body.rows();
  const int nl = static_cast<int>(p.landmarks.size());
  const Mat& Ax = p.cell.body.normals;
  const Vec& bx = p.cell.body.offsets;
  add_gain_variables(lp, p.layout);

  for (int k = 0; k < static_cast<int>(p.rows.size()); ++k) {
    const clfcbf::ConstraintRow& row = p.rows[k];
    RowIndex ri;
    ri.delta = add_margin_variable(lp, p, k);
    for (int j = 0; j < nc; ++j)
      ri.lambda_x.push_back(lp.add_variable(idx("lambda_x", {k, j}), 0.0, lp::kInf));
    for (int L = 0; L < nl; ++L) {
      const int np = p.kernels[L].spec.points();
      RowIndex::PerLandmark pl;
      for (int r = 0; r < 2 * d; ++r)
        pl.lambda_p.push_back(lp.add_variable(idx("lambda_p", {k, L, r}), 0.0, lp::kInf));
      pl.lambda_s = lp.add_variable(idx("lambda_s", {k, L}), -lp::kInf, lp::kInf);
      for (int q = 0; q < d; ++q)
        pl.lambda_z.push_back(lp.add_variable(idx("lambda_z", {k, L, q}), 0.0, lp::kInf));
      auto grid_block = [&](const std::string& name) {
        std::vector<std::vector<int>> blk(d, std::vector<int>(np));
        for (int q = 0; q < d; ++q)
          for (int i = 0; i < np; ++i)
            blk[q][i] = lp.add_variable(idx(name, {k, L, q, i}), 0.0, lp::kInf);
        return blk;
      };
      pl.rho1 = grid_block("rho1");
      pl.rho2 = grid_block("rho2");
      pl.beta.assign(np, std::vector<int>(nc));
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < nc; ++j)
          pl.beta[i][j] = lp.add_variable(idx("beta", {k, L, i, j}), 0.0, lp::kInf);
      pl.eta1 = grid_block("eta1");
      pl.eta2 = grid_block("eta2");
      ri.landmarks.push_back(std::move(pl));
    }

    // (i) scalarized worst case over the cell.
    {
      std::vector<std::pair<int, double>> t;
      for (int j = 0; j < nc; ++j) t.emplace_back(ri.lambda_x[j], -bx(j));
      for (int L = 0; L < nl; ++L) {
        const auto& pl = ri.landmarks[L];
        const auto& blk = p.blocks[L];
        const int np = p.kernels[L].spec.points();
        for (int q = 0; q < d; ++q)
          for (int i = 0; i < np; ++i) {
            const double c = -blk.U(q, i) + blk.landmark(q);
            t.emplace_back(pl.rho1[q][i], c);
            t.emplace_back(pl.rho2[q][i], -c);
          }
        for (int r = 0; r < 2 * d; ++r) t.emplace_back(pl.lambda_p[r], -blk.b_p(r));
        for (int q = 0; q < d; ++q) t.emplace_back(pl.lambda_z[q], p.bounds.sigma_m);
        t.emplace_back(pl.lambda_s, 1.0);
      }
      t.emplace_back(ri.delta, 1.0);
      append_affine(t, row.r, 1.0);
      lp.add_ub(idx("worst", {k}), std::move(t), -row.r.constant);
    }
    // (ii) stationarity in x.
    for (int q = 0; q < d; ++q) {
      std::vector<std::pair<int, double>> t;
      for (int L = 0; L < nl; ++L) {
        const auto& pl = ri.landmarks[L];
        const auto& blk = p.blocks[L];
        for (int r = 0; r < 2 * d; ++r)
          if (blk.A_x(r, q) != 0.0) t.emplace_back(pl.lambda_p[r], -blk.A_x(r, q));
        for (int i = 0; i < p.kernels[L].spec.points(); ++i) {
          t.emplace_back(pl.rho1[q][i], -1.0);
          t.emplace_back(pl.rho2[q][i], 1.0);
        }
      }
      for (int j = 0; j < nc; ++j)
        if (Ax(j, q) != 0.0) t.emplace_back(ri.lambda_x[j], -Ax(j, q));
      lp.add_eq(idx("stat_x", {k, q}), std::move(t), -row.c_x(q));
    }
    for (int L = 0; L < nl; ++L) {
      const auto& pl = ri.landmarks[L];
      const auto& blk = p.blocks[L];
      const int np = p.kernels[L].spec.points();
      // (iii)
      for (int q = 0; q < d; ++q)
        for (int i = 0; i < np; ++i)
          lp.add_eq(idx("rho", {k, L, q, i}), {{pl.rho1[q][i], 1.0}, {pl.rho2[q][i], 1.0}}, 0.0);
      // (iv) per grid point.
      for (int i = 0; i < np; ++i) {
        std::vector<std::pair<int, double>> t;
        for (int j = 0; j < nc; ++j) t.emplace_back(pl.beta[i][j], -bx(j));
        for (int q = 0; q < d; ++q) {
          const double c = -blk.U(q, i) + blk.landmark(q);
          t.emplace_back(pl.eta1[q][i], c);
          t.emplace_back(pl.eta2[q][i], -c);
        }
        append_affine(t, row.c_p[L][i], 1.0);
        for (int r = 0; r < 2 * d; ++r)
          if (blk.A_p(r, i) != 0.0) t.emplace_back(pl.lambda_p[r], -blk.A_p(r, i));
        t.emplace_back(pl.lambda_s, -1.0);
        lp.add_ub(idx("grid", {k, L, i}), std::move(t), -row.c_p[L][i].constant);
      }
      // (v)
      for (int i = 0; i < np; ++i)
        for (int q = 0; q < d; ++q) {
          std::vector<std::pair<int, double>> t;
          for (int j = 0; j < nc; ++j)
            if (Ax(j, q) != 0.0) t.emplace_back(pl.beta[i][j], Ax(j, q));
          t.emplace_back(pl.eta1[q][i], 1.0);
          t.emplace_back(pl.eta2[q][i], -1.0);
          lp.add_eq(idx("stat_z", {k, L, i, q}), std::move(t), 0.0);
        }
      // (vi)
      for (int q = 0; q < d; ++q)
        for (int i = 0; i < np; ++i)
          lp.add_eq(idx("split", {k, L, q, i}),
                    {{pl.lambda_z[q], 1.0}, {pl.eta1[q][i], -1.0}, {pl.eta2[q][i], -1.0}},
                    0.0);
    }
    out.rows.push_back(std::move(ri));
  }
  if (p.goal_pmfs) add_goal_constraint(lp, p);
  return out;
}

void add_goal_constraint(lp::StandardLp& lp, const CellProblem& p) {
  if (!p.goal_pmfs) fail(ErrorKind::DimensionMismatch, "goal constraint needs goal PMFs");
  const auto& g = p.layout;
  for (int a = 0; a < g.n_u; ++a) {
    std::vector<std::pair<int, double>> t;
    for (int L = 0; L < g.n_landmarks; ++L) {
      const Vec& P = (*p.goal_pmfs)[L];
      for (int m = 0; m < g.n_maps; ++m) {
        const Vec y = p.basis[L].maps[m] * P;
        for (int b = 0; b < g.d; ++b)
          if (y(b) != 0.0) t.emplace_back(g.K(L, m, a, b), y(b));
      }
    }
    t.emplace_back(g.Kb(a), 1.0);
    lp.add_eq(idx("goal", {a}), std::move(t), 0.0);
  }
}

}  // namespace safe_field::synthesis

namespace safe_field::synthesis {

std::vector<std::string> dimension_header(const CellProblem& p) {
  const LpDimensions dim = expected_dimensions(p);
  int np = 0;
  for (const auto& k : p.kernels) np += k.spec.points();
  std::vector<std::string> h;
  h.push_back("cell " + std::to_string(p.cell.id) + ": rows k=" + std::to_string(p.rows.size()) +
              " facets n_c=" + std::to_string(p.cell.body.rows()) + " d=" +
              std::to_string(p.cell.body.dim()) + " landmarks=" +
              std::to_string(p.landmarks.size()) + " grid points=" + std::to_string(np));
  h.push_back("variables = gains + sum_k (1 + n_c + sum_L (3d + 1 + 4 d n_p + n_p n_c)) = " +
              std::to_string(dim.variables));
  h.push_back("ub rows = sum_k (1 + sum_L n_p) = " + std::to_string(dim.ub_rows));
  h.push_back("eq rows = sum_k (d + sum_L 3 d n_p) + goal = " + std::to_string(dim.eq_rows));
  return h;
}

}  // namespace safe_field::synthesis

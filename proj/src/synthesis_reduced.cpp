#include <algorithm>
#include <cmath>
#include <string>

#include "synthesis_internal.hpp"

namespace safe_field::synthesis {

namespace {

std::string idx(const std::string& base, std::initializer_list<int> ids) {
  std::string s = base;
  for (int i : ids) s += "[" + std::to_string(i) + "]";
  return s;
}

}  // namespace

std::vector<Vec> distance_candidates(const geometry::ConvexCell& cell, const Vec& a) {
  if (cell.body.dim() != 2) fail(ErrorKind::DimensionMismatch, "candidate sets are 2D only");
  if (geometry::contains_point(cell, a, 1e-12)) return {Vec::Zero(2)};
  std::vector<Vec> pts = cell.vertices;
  const int nv = static_cast<int>(cell.vertices.size());
  for (int e = 0; e < nv; ++e) {
    const Vec& p0 = cell.vertices[e];
    const Vec& p1 = cell.vertices[(e + 1) % nv];
    for (int q = 0; q < 2; ++q) {
      const double s0 = p0(q) - a(q), s1 = p1(q) - a(q);
      if (s0 * s1 < 0.0) {
        const double t = s0 / (s0 - s1);
        Vec x = p0 + t * (p1 - p0);
        x(q) = a(q);
        pts.push_back(x);
      }
    }
  }
  std::vector<Vec> w;
  for (const Vec& x : pts) w.push_back((x - a).cwiseAbs());
  std::sort(w.begin(), w.end(), [](const Vec& u, const Vec& v) {
    return u(0) != v(0) ? u(0) < v(0) : u(1) < v(1);
  });
  std::vector<Vec> out;
  for (const Vec& c : w) {
    bool dominated = false;
    for (const Vec& o : out) {
      if ((o.array() <= c.array() + 1e-12).all()) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(c);
  }
  return out;
}

ReducedLp assemble_reduced_lp(const CellProblem& p) {
  ReducedLp out;
  lp::StandardLp& lp = out.lp;
  lp.sense = lp::Sense::Maximize;
  const int d = p.cell.body.dim();
  const int nl = static_cast<int>(p.landmarks.size());
  add_gain_variables(lp, p.layout);

  // Per landmark and grid point, the Pareto candidates are shared by all rows.
  std::vector<std::vector<std::vector<Vec>>> cands(nl);
  for (int L = 0; L < nl; ++L) {
    const auto& blk = p.blocks[L];
    for (int i = 0; i < blk.U.cols(); ++i)
      cands[L].push_back(distance_candidates(p.cell, blk.landmark - blk.U.col(i)));
  }

  const int K = static_cast<int>(p.rows.size());
  out.lambda_p.resize(K);
  out.lambda_s.resize(K);
  out.lambda_z.resize(K);
  for (int k = 0; k < K; ++k) {
    const clfcbf::ConstraintRow& row = p.rows[k];
    out.delta.push_back(add_margin_variable(lp, p, k));
    out.lambda_p[k].resize(nl);
    out.lambda_z[k].resize(nl);
    for (int L = 0; L < nl; ++L) {
      for (int r = 0; r < 2 * d; ++r)
        out.lambda_p[k][L].push_back(lp.add_variable(idx("lambda_p", {k, L, r}), 0.0, lp::kInf));
      out.lambda_s[k].push_back(lp.add_variable(idx("lambda_s", {k, L}), -lp::kInf, lp::kInf));
      for (int q = 0; q < d; ++q)
        out.lambda_z[k][L].push_back(lp.add_variable(idx("lambda_z", {k, L, q}), 0.0, lp::kInf));
    }

    for (size_t v = 0; v < p.cell.vertices.size(); ++v) {
      const Vec& xv = p.cell.vertices[v];
      std::vector<std::pair<int, double>> t;
      for (int L = 0; L < nl; ++L) {
        const auto& blk = p.blocks[L];
        for (int r = 0; r < 2 * d; ++r) {
          const double c = -blk.A_x.row(r).dot(xv) - blk.b_p(r);
          t.emplace_back(out.lambda_p[k][L][r], c);
        }
        for (int q = 0; q < d; ++q) t.emplace_back(out.lambda_z[k][L][q], p.bounds.sigma_m);
        t.emplace_back(out.lambda_s[k][L], 1.0);
      }
      t.emplace_back(out.delta[k], 1.0);
      append_affine(t, row.r, 1.0);
      lp.add_ub(idx("vertex", {k, static_cast<int>(v)}), std::move(t),
                -row.c_x.dot(xv) - row.r.constant);
    }
    for (int L = 0; L < nl; ++L) {
      const auto& blk = p.blocks[L];
      for (int i = 0; i < blk.U.cols(); ++i) {
        std::vector<std::pair<int, double>> base;
        append_affine(base, row.c_p[L][i], 1.0);
        for (int r = 0; r < 2 * d; ++r)
          if (blk.A_p(r, i) != 0.0) base.emplace_back(out.lambda_p[k][L][r], -blk.A_p(r, i));
        base.emplace_back(out.lambda_s[k][L], -1.0);
        const auto& cs = cands[L][i];
        for (size_t c = 0; c < cs.size(); ++c) {
          auto t = base;
          for (int q = 0; q < d; ++q)
            if (cs[c](q) != 0.0) t.emplace_back(out.lambda_z[k][L][q], -cs[c](q));
          lp.add_ub(idx("cand", {k, L, i, static_cast<int>(c)}), std::move(t),
                    -row.c_p[L][i].constant);
        }
      }
    }
  }
  if (p.goal_pmfs) add_goal_constraint(lp, p);
  return out;
}

std::vector<RowMultipliers> recover_multipliers(const CellProblem& p,
                                                const ReducedLp& red,
                                                const std::vector<double>& x) {
  const int d = p.cell.body.dim();
  const int nc = p.cell.body.rows();
  const int nl = static_cast<int>(p.landmarks.size());
  const Mat& Ax = p.cell.body.normals;
  const Vec& bx = p.cell.body.offsets;
  std::vector<RowMultipliers> out;
  for (size_t k = 0; k < p.rows.size(); ++k) {
    RowMultipliers m;
    m.delta = x[red.delta[k]];
    Vec g = p.rows[k].c_x;
    for (int L = 0; L < nl; ++L) {
      LandmarkMultipliers lm;
      const auto& blk = p.blocks[L];
      const int np = static_cast<int>(blk.U.cols());
      lm.lambda_p.resize(2 * d);
      for (int r = 0; r < 2 * d; ++r) lm.lambda_p(r) = x[red.lambda_p[k][L][r]];
      lm.lambda_s = x[red.lambda_s[k][L]];
      lm.lambda_z.resize(d);
      for (int q = 0; q < d; ++q) lm.lambda_z(q) = x[red.lambda_z[k][L][q]];
      g -= blk.A_x.transpose() * lm.lambda_p;
      lm.rho1 = Mat::Zero(d, np);
      lm.rho2 = Mat::Zero(d, np);
      lm.beta = Mat::Zero(np, nc);
      lm.eta1 = Mat::Zero(d, np);
      lm.eta2 = Mat::Zero(d, np);
      if (lm.lambda_z.maxCoeff() > 0.0) {
        for (int i = 0; i < np; ++i) {
          const Vec a = blk.landmark - blk.U.col(i);
          lp::StandardLp s;
          s.sense = lp::Sense::Minimize;
          for (int j = 0; j < nc; ++j) s.add_variable(idx("beta", {j}), 0.0, lp::kInf, -bx(j));
          for (int q = 0; q < d; ++q) {
            s.add_variable(idx("eta1", {q}), 0.0, lp::kInf, a(q));
            s.add_variable(idx("eta2", {q}), 0.0, lp::kInf, -a(q));
          }
          for (int q = 0; q < d; ++q) {
            std::vector<std::pair<int, double>> t;
            for (int j = 0; j < nc; ++j)
              if (Ax(j, q) != 0.0) t.emplace_back(j, Ax(j, q));
            t.emplace_back(nc + 2 * q, 1.0);
            t.emplace_back(nc + 2 * q + 1, -1.0);
            s.add_eq(idx("stat", {q}), std::move(t), 0.0);
            s.add_eq(idx("split", {q}), {{nc + 2 * q, 1.0}, {nc + 2 * q + 1, 1.0}},
                     lm.lambda_z(q));
          }
          const lp::LpSolution sol = lp::solve_lp(s);
          if (sol.status != lp::Status::Optimal)
            fail(ErrorKind::NumericalFailure, "multiplier recovery failed at grid point " +
                                                  std::to_string(i));
          for (int j = 0; j < nc; ++j) lm.beta(i, j) = sol.x[j];
          for (int q = 0; q < d; ++q) {
            lm.eta1(q, i) = sol.x[nc + 2 * q];
            lm.eta2(q, i) = sol.x[nc + 2 * q + 1];
          }
        }
      }
      m.landmarks.push_back(std::move(lm));
    }
    lp::StandardLp s;
    s.sense = lp::Sense::Minimize;
    for (int j = 0; j < nc; ++j) s.add_variable(idx("lambda_x", {j}), 0.0, lp::kInf, -bx(j));
    for (int q = 0; q < d; ++q) {
      std::vector<std::pair<int, double>> t;
      for (int j = 0; j < nc; ++j)
        if (Ax(j, q) != 0.0) t.emplace_back(j, Ax(j, q));
      s.add_eq(idx("stat", {q}), std::move(t), g(q));
    }
    const lp::LpSolution sol = lp::solve_lp(s);
    if (sol.status != lp::Status::Optimal)
      fail(ErrorKind::NumericalFailure, "recovery of lambda_x failed for row " + std::to_string(k));
    m.lambda_x = Eigen::Map<const Vec>(sol.x.data(), nc);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<double> assembled_point(const AssembledLp& a, const Vec& gains,
                                    const std::vector<RowMultipliers>& m) {
  std::vector<double> x(a.lp.num_vars(), 0.0);
  for (int i = 0; i < gains.size(); ++i) x[i] = gains(i);
  for (size_t k = 0; k < a.rows.size(); ++k) {
    const RowIndex& ri = a.rows[k];
    x[ri.delta] = m[k].delta;
    for (size_t j = 0; j < ri.lambda_x.size(); ++j) x[ri.lambda_x[j]] = m[k].lambda_x(j);
    for (size_t L = 0; L < ri.landmarks.size(); ++L) {
      const auto& pl = ri.landmarks[L];
      const auto& lm = m[k].landmarks[L];
      for (size_t r = 0; r < pl.lambda_p.size(); ++r) x[pl.lambda_p[r]] = lm.lambda_p(r);
      x[pl.lambda_s] = lm.lambda_s;
      for (size_t q = 0; q < pl.lambda_z.size(); ++q) x[pl.lambda_z[q]] = lm.lambda_z(q);
      for (size_t q = 0; q < pl.rho1.size(); ++q)
        for (size_t i = 0; i < pl.rho1[q].size(); ++i) {
          x[pl.rho1[q][i]] = lm.rho1(q, i);
          x[pl.rho2[q][i]] = lm.rho2(q, i);
          x[pl.eta1[q][i]] = lm.eta1(q, i);
          x[pl.eta2[q][i]] = lm.eta2(q, i);
        }
      for (size_t i = 0; i < pl.beta.size(); ++i)
        for (size_t j = 0; j < pl.beta[i].size(); ++j) x[pl.beta[i][j]] = lm.beta(i, j);
    }
  }
  return x;
}

}  // namespace safe_field::synthesis

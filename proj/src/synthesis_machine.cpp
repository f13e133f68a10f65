#include <array>
#include <map>
#include <string>

#include "synthesis_internal.hpp"

namespace safe_field::synthesis {

namespace {

// Polynomial with terms c * w_a * xi_t, where -1 marks an absent factor.
// w indexes variables of the final LP, xi indexes the uncertain quantities.
struct Poly {
  std::map<std::pair<int, int>, double> t;

  Poly() = default;
  explicit Poly(double c) {
    if (c != 0.0) t[{-1, -1}] = c;
  }
  static Poly w(int a, double c = 1.0) {
    Poly p;
    if (c != 0.0) p.t[{a, -1}] = c;
    return p;
  }
  static Poly xi(int s, double c = 1.0) {
    Poly p;
    if (c != 0.0) p.t[{-1, s}] = c;
    return p;
  }
  Poly& operator+=(const Poly& o) {
    for (const auto& [k, c] : o.t) {
      const double v = (t[k] += c);
      if (v == 0.0) t.erase(k);
    }
    return *this;
  }
  Poly operator+(const Poly& o) const { Poly r = *this; r += o; return r; }
  Poly operator-() const {
    Poly r = *this;
    for (auto& kv : r.t) kv.second = -kv.second;
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + (-o); }
  Poly operator*(double s) const {
    Poly r;
    if (s == 0.0) return r;
    r.t = t;
    for (auto& kv : r.t) kv.second *= s;
    return r;
  }
  // this * w_a, for a polynomial free of w.
  Poly times_w(int a) const {
    Poly r;
    for (const auto& [k, c] : t) {
      if (k.first != -1) fail(ErrorKind::DimensionMismatch, "bilinear term in w");
      r.t[{a, k.second}] = c;
    }
    return r;
  }
  double constant() const {
    auto it = t.find({-1, -1});
    return it == t.end() ? 0.0 : it->second;
  }
  bool has_xi() const {
    for (const auto& kv : t)
      if (kv.first.second != -1) return true;
    return false;
  }
  bool has_w() const {
    for (const auto& kv : t)
      if (kv.first.first != -1) return true;
    return false;
  }
  // Coefficient of xi_s as a polynomial in w.
  Poly coef_xi(int s) const {
    Poly r;
    for (const auto& [k, c] : t)
      if (k.second == s) r.t[{k.first, -1}] = c;
    return r;
  }
  Poly xi_free() const {
    Poly r;
    for (const auto& [k, c] : t)
      if (k.second == -1) r.t[k] = c;
    return r;
  }
};

Poly from_affine(const clfcbf::AffineInGains& e) {
  Poly p(e.constant);
  for (const auto& [i, c] : e.terms) p += Poly::w(i, c);
  return p;
}

std::string idx(const std::string& base, std::initializer_list<int> ids) {
  std::string s = base;
  for (int i : ids) s += "[" + std::to_string(i) + "]";
  return s;
}

// Splits a w-linear polynomial into LP terms and a constant.
void w_terms(const Poly& p, double scale, std::vector<std::pair<int, double>>& terms,
             double& constant) {
  for (const auto& [k, c] : p.t) {
    if (k.second != -1) fail(ErrorKind::DimensionMismatch, "uncertain term left after robustification");
    if (k.first == -1) constant += scale * c;
    else terms.emplace_back(k.first, scale * c);
  }
}

class MachineBuilder {
 public:
  explicit MachineBuilder(const CellProblem& p) : p_(p) {
    d_ = p.cell.body.dim();
    int off = d_;
    for (const auto& k : p.kernels) {
      z_offset_.push_back(off);
      off += d_ * k.spec.points();
    }
  }

  lp::StandardLp build() {
    lp_.sense = lp::Sense::Maximize;
    add_gain_variables(lp_, p_.layout);
    for (int k = 0; k < static_cast<int>(p_.rows.size()); ++k) add_row(k);
    if (p_.goal_pmfs) add_goal_constraint(lp_, p_);
    return std::move(lp_);
  }

 private:
  int z_index(int L, int q, int i) const {
    return z_offset_[L] + q * p_.kernels[L].spec.points() + i;
  }

  void add_row(int k) {
    const clfcbf::ConstraintRow& row = p_.rows[k];
    const int delta = add_margin_variable(lp_, p_, k);

    // Stage 1: the inner maximization over PMFs, with (x, z) symbolic.
    lp::BasicLp<Poly> inner;
    inner.sense = lp::Sense::Maximize;
    std::vector<std::vector<int>> pv(p_.landmarks.size());
    for (size_t L = 0; L < p_.landmarks.size(); ++L) {
      const int np = p_.kernels[L].spec.points();
      for (int i = 0; i < np; ++i)
        pv[L].push_back(inner.add_variable(idx("P", {static_cast<int>(L), i}), 0.0, lp::kInf,
                                           from_affine(row.c_p[L][i])));
    }
    for (size_t L = 0; L < p_.landmarks.size(); ++L) {
      const auto& blk = p_.blocks[L];
      const int np = p_.kernels[L].spec.points();
      const int Li = static_cast<int>(L);
      std::vector<std::pair<int, Poly>> sum;
      for (int i = 0; i < np; ++i) sum.emplace_back(pv[L][i], Poly(1.0));
      inner.add_eq(idx("simplex", {Li}), std::move(sum), Poly(1.0));
      for (int r = 0; r < 2 * d_; ++r) {
        std::vector<std::pair<int, Poly>> t;
        for (int i = 0; i < np; ++i)
          if (blk.A_p(r, i) != 0.0) t.emplace_back(pv[L][i], Poly(blk.A_p(r, i)));
        Poly rhs(-blk.b_p(r));
        for (int q = 0; q < d_; ++q) rhs += Poly::xi(q, -blk.A_x(r, q));
        inner.add_ub(idx("mean", {Li, r}), std::move(t), rhs);
      }
      for (int q = 0; q < d_; ++q) {
        std::vector<std::pair<int, Poly>> t;
        for (int i = 0; i < np; ++i) t.emplace_back(pv[L][i], Poly::xi(z_index(Li, q, i)));
        inner.add_ub(idx("mad", {Li, q}), std::move(t), Poly(blk.sigma_m));
      }
    }
    const lp::Dualized<Poly> dual = lp::dualize(inner);
    std::vector<int> wy;
    for (int j = 0; j < dual.lp.num_vars(); ++j)
      wy.push_back(lp_.add_variable(idx("s1", {k}) + dual.lp.names[j], dual.lp.lower[j],
                                    dual.lp.upper[j]));

    // Dual objective plus the certain part of the row, for all uncertainty.
    Poly g = from_affine(row.r) + Poly::w(delta);
    for (int q = 0; q < d_; ++q) g += Poly::xi(q, row.c_x(q));
    for (int j = 0; j < dual.lp.num_vars(); ++j) g += dual.lp.cost[j].times_w(wy[j]);
    g += dual.lp.cost_offset;
    int count = 0;
    robustify(k, count++, g);
    for (const auto& r : dual.lp.ub) robustify(k, count++, row_poly(r, wy));
    for (const auto& r : dual.lp.eq) {
      const Poly h = row_poly(r, wy);
      robustify(k, count++, h);
      robustify(k, count++, -h);
    }
  }

  static Poly row_poly(const lp::LpRow<Poly>& r, const std::vector<int>& wy) {
    Poly h = -r.rhs;
    for (const auto& [j, c] : r.terms) h += c.times_w(wy[j]);
    return h;
  }

  // Stage 2: g(w, xi) <= 0 for all xi in the uncertainty set, via the dual
  // of max over xi.
  void robustify(int k, int c, const Poly& g) {
    const Mat& A = p_.cell.body.normals;
    const Vec& b = p_.cell.body.offsets;
    lp::BasicLp<Poly> outer;
    outer.sense = lp::Sense::Maximize;
    std::map<int, int> var;
    for (int q = 0; q < d_; ++q)
      var[q] = outer.add_variable(idx("x", {q}), -lp::kInf, lp::kInf, g.coef_xi(q));
    std::map<int, std::array<int, 3>> zs;
    for (const auto& kv : g.t) {
      const int s = kv.first.second;
      if (s < d_ || var.count(s)) continue;
      int L = static_cast<int>(z_offset_.size()) - 1;
      while (z_offset_[L] > s) --L;
      const int np = p_.kernels[L].spec.points();
      const int q = (s - z_offset_[L]) / np, i = (s - z_offset_[L]) % np;
      var[s] = outer.add_variable(idx("z", {L, q, i}), -lp::kInf, lp::kInf, g.coef_xi(s));
      zs[s] = {L, q, i};
    }
    outer.cost_offset = g.xi_free();
    for (int j = 0; j < A.rows(); ++j) {
      std::vector<std::pair<int, Poly>> t;
      for (int q = 0; q < d_; ++q)
        if (A(j, q) != 0.0) t.emplace_back(var[q], Poly(A(j, q)));
      outer.add_ub(idx("cell", {j}), std::move(t), Poly(-b(j)));
    }
    for (const auto& [s, lqi] : zs) {
      const auto [L, q, i] = lqi;
      const auto& blk = p_.blocks[L];
      const double a = blk.landmark(q) - blk.U(q, i);
      outer.add_ub(idx("zhi", {L, q, i}), {{var[q], Poly(1.0)}, {var[s], Poly(-1.0)}}, Poly(a));
      outer.add_ub(idx("zlo", {L, q, i}), {{var[q], Poly(-1.0)}, {var[s], Poly(-1.0)}}, Poly(-a));
    }
    const lp::Dualized<Poly> dual = lp::dualize(outer);
    std::vector<int> mu;
    for (int j = 0; j < dual.lp.num_vars(); ++j)
      mu.push_back(lp_.add_variable(idx("s2", {k, c}) + dual.lp.names[j], dual.lp.lower[j],
                                    dual.lp.upper[j]));
    {
      std::vector<std::pair<int, double>> t;
      double constant = 0.0;
      for (int j = 0; j < dual.lp.num_vars(); ++j) {
        if (dual.lp.cost[j].has_w() || dual.lp.cost[j].has_xi())
          fail(ErrorKind::DimensionMismatch, "uncertainty set data must be numeric");
        const double v = dual.lp.cost[j].constant();
        if (v != 0.0) t.emplace_back(mu[j], v);
      }
      w_terms(dual.lp.cost_offset, 1.0, t, constant);
      lp_.add_ub(idx("robust", {k, c}), std::move(t), -constant);
    }
    auto emit = [&](const lp::LpRow<Poly>& r, bool eq) {
      std::vector<std::pair<int, double>> t;
      for (const auto& [j, a] : r.terms) t.emplace_back(mu[j], a.constant());
      double constant = 0.0;
      w_terms(r.rhs, -1.0, t, constant);
      if (eq) lp_.add_eq(idx("robust", {k, c}) + r.name, std::move(t), -constant);
      else lp_.add_ub(idx("robust", {k, c}) + r.name, std::move(t), -constant);
    };
    for (const auto& r : dual.lp.eq) emit(r, true);
    for (const auto& r : dual.lp.ub) emit(r, false);
  }

  const CellProblem& p_;
  int d_ = 2;
  std::vector<int> z_offset_;
  lp::StandardLp lp_;
};

}  // namespace

lp::StandardLp assemble_machine_lp(const CellProblem& p) {
  return MachineBuilder(p).build();
}

}  // namespace safe_field::synthesis

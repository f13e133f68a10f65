#include "safe_field/clfcbf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "safe_field/errors.hpp"

namespace safe_field::clfcbf {

Dynamics single_integrator(int d) {
  return {Mat::Zero(d, d), Mat::Identity(d, d)};
}

GainBasis build_gain_basis(const std::vector<std::string>& names,
                           const measurement::ExpectationKernel& kernel) {
  GainBasis b;
  const Mat& U = kernel.U;
  for (const auto& name : names) {
    Mat R(U.rows(), U.cols());
    if (name == "mean") {
      R = U;
    } else if (name == "quadratic") {
      R = U.array().square();
    } else if (name == "cosine") {
      for (int q = 0; q < U.rows(); ++q) {
        const double half = kernel.spec.width[q] / 2;
        R.row(q) = (std::numbers::pi * U.row(q).array() / half).cos();
      }
    } else {
      fail(ErrorKind::ConfigError, "unknown gain basis map '" + name + "'");
    }
    b.names.push_back(name);
    b.maps.push_back(std::move(R));
  }
  if (std::find(names.begin(), names.end(), "mean") == names.end()) {
    fail(ErrorKind::ConfigError, "gain basis must include the mean map");
  }
  return b;
}

Mat Gains::K(int L, int m) const {
  Mat k(layout.n_u, layout.d);
  for (int a = 0; a < layout.n_u; ++a) {
    for (int b = 0; b < layout.d; ++b) k(a, b) = values(layout.K(L, m, a, b));
  }
  return k;
}

Vec Gains::Kb() const {
  Vec k(layout.n_u);
  for (int a = 0; a < layout.n_u; ++a) k(a) = values(layout.Kb(a));
  return k;
}

double AffineInGains::evaluate(const Vec& gains) const {
  double s = constant;
  for (const auto& [i, c] : terms) s += c * gains(i);
  return s;
}

void AffineInGains::add(int index, double coef) { terms.emplace_back(index, coef); }

void AffineInGains::normalize() {
  std::sort(terms.begin(), terms.end());
  std::vector<std::pair<int, double>> out;
  for (const auto& t : terms) {
    if (!out.empty() && out.back().first == t.first) {
      out.back().second += t.second;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const auto& t) { return t.second == 0.0; });
  terms = std::move(out);
}

AffineInGains& AffineInGains::operator+=(const AffineInGains& o) {
  constant += o.constant;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  normalize();
  return *this;
}

AffineInGains AffineInGains::operator*(double s) const {
  AffineInGains out = *this;
  out.constant *= s;
  for (auto& t : out.terms) t.second *= s;
  return out;
}

std::string ConstraintRow::label() const {
  switch (kind) {
    case RowKind::Clf: return "clf";
    case RowKind::Cbf: return "cbf" + std::to_string(index);
    case RowKind::Input:
      return std::string("input") + std::to_string(index / 2) +
             (index % 2 ? "-" : "+");
  }
  return "row";
}

namespace {

// Row with input direction w_u: c_p = w_u^T K_P, r = w_u^T K_b + r0.
ConstraintRow direction_row(RowKind kind, int index, const Vec& c_x,
                            const Vec& w_u, double r0, const GainLayout& layout,
                            const std::vector<GainBasis>& basis) {
  if (static_cast<int>(basis.size()) != layout.n_landmarks) {
    fail(ErrorKind::DimensionMismatch, "one gain basis per landmark expected");
  }
  ConstraintRow row;
  row.kind = kind;
  row.index = index;
  row.c_x = c_x;
  row.c_p.resize(layout.n_landmarks);
  for (int L = 0; L < layout.n_landmarks; ++L) {
    const GainBasis& gb = basis[L];
    if (gb.size() != layout.n_maps) {
      fail(ErrorKind::DimensionMismatch, "basis size disagrees with layout");
    }
    const int np = static_cast<int>(gb.maps.front().cols());
    row.c_p[L].resize(np);
    for (int i = 0; i < np; ++i) {
      AffineInGains& e = row.c_p[L][i];
      for (int m = 0; m < layout.n_maps; ++m) {
        for (int a = 0; a < layout.n_u; ++a) {
          if (w_u(a) == 0.0) continue;
          for (int b = 0; b < layout.d; ++b) {
            const double c = w_u(a) * gb.maps[m](b, i);
            if (c != 0.0) e.add(layout.K(L, m, a, b), c);
          }
        }
      }
      e.normalize();
    }
  }
  row.r.constant = r0;
  for (int a = 0; a < layout.n_u; ++a) {
    if (w_u(a) != 0.0) row.r.add(layout.Kb(a), w_u(a));
  }
  row.r.normalize();
  return row;
}

}  // namespace

ConstraintRow build_clf_row(const Vec& v, const Vec& o, const Dynamics& dyn,
                            double alpha_v, const GainLayout& layout,
                            const std::vector<GainBasis>& basis) {
  const int d = dyn.d();
  if (v.size() != d || o.size() != d || dyn.B.rows() != d) {
    fail(ErrorKind::DimensionMismatch, "CLF row dimensions");
  }
  const Mat M = dyn.A + alpha_v * Mat::Identity(d, d);
  return direction_row(RowKind::Clf, 0, M.transpose() * v, dyn.B.transpose() * v,
                       -alpha_v * v.dot(o), layout, basis);
}

std::vector<ConstraintRow> build_cbf_rows(const Mat& normals, const Vec& offsets,
                                          const std::vector<int>& rows,
                                          const Dynamics& dyn, double alpha_h,
                                          const GainLayout& layout,
                                          const std::vector<GainBasis>& basis) {
  const int d = dyn.d();
  const Mat M = dyn.A + alpha_h * Mat::Identity(d, d);
  std::vector<ConstraintRow> out;
  for (int j : rows) {
    const Vec a = normals.row(j).transpose();
    out.push_back(direction_row(RowKind::Cbf, j, M.transpose() * a,
                                dyn.B.transpose() * a, alpha_h * offsets(j),
                                layout, basis));
  }
  return out;
}

std::vector<ConstraintRow> build_input_rows(double u_max, const GainLayout& layout,
                                            const std::vector<GainBasis>& basis) {
  std::vector<ConstraintRow> out;
  for (int a = 0; a < layout.n_u; ++a) {
    for (int s = 0; s < 2; ++s) {
      Vec w = Vec::Zero(layout.n_u);
      w(a) = s == 0 ? 1.0 : -1.0;
      out.push_back(direction_row(RowKind::Input, 2 * a + s, Vec::Zero(layout.d), w,
                                  -u_max, layout, basis));
    }
  }
  return out;
}

Vec concrete_cp(const ConstraintRow& row, int landmark, const Vec& gains) {
  const auto& cp = row.c_p[landmark];
  Vec out(cp.size());
  for (size_t i = 0; i < cp.size(); ++i) out(i) = cp[i].evaluate(gains);
  return out;
}

double evaluate_row(const ConstraintRow& row, const Vec& gains, const Vec& x,
                    const std::vector<Vec>& pmfs) {
  if (pmfs.size() != row.c_p.size()) {
    fail(ErrorKind::DimensionMismatch, "one PMF per landmark expected");
  }
  double s = row.c_x.dot(x) + row.r.evaluate(gains);
  for (size_t L = 0; L < pmfs.size(); ++L) {
    if (static_cast<size_t>(pmfs[L].size()) != row.c_p[L].size()) {
      fail(ErrorKind::DimensionMismatch, "PMF length");
    }
    s += concrete_cp(row, static_cast<int>(L), gains).dot(pmfs[L]);
  }
  return s;
}

}  // namespace safe_field::clfcbf

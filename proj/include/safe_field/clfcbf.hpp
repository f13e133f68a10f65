#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "safe_field/measurement.hpp"

namespace safe_field::clfcbf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Dynamics {
  Mat A;
  Mat B;
  int d() const { return static_cast<int>(A.rows()); }
  int n_u() const { return static_cast<int>(B.cols()); }
};

Dynamics single_integrator(int d);

// Linear maps R_m (d x n_p) with K_P = sum_m K_m R_m.
struct GainBasis {
  std::vector<std::string> names;
  std::vector<Mat> maps;
  int size() const { return static_cast<int>(maps.size()); }
};

// names from {"mean", "quadratic", "cosine"}.
GainBasis build_gain_basis(const std::vector<std::string>& names,
                           const measurement::ExpectationKernel& kernel);

// Index layout of the gain decision variables: K[L][m] (n_u x d, row-major)
// for landmark L and map m, then K_b.
struct GainLayout {
  int n_u = 2;
  int d = 2;
  int n_landmarks = 1;
  int n_maps = 3;

  int K(int L, int m, int a, int b) const {
    return ((L * n_maps + m) * n_u + a) * d + b;
  }
  int Kb(int a) const { return n_landmarks * n_maps * n_u * d + a; }
  int size() const { return n_landmarks * n_maps * n_u * d + n_u; }
};

struct Gains {
  GainLayout layout;
  Vec values;

  Mat K(int L, int m) const;
  Vec Kb() const;
};

struct AffineInGains {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;  // sorted by index, merged

  double evaluate(const Vec& gains) const;
  void add(int index, double coef);
  void normalize();
  AffineInGains& operator+=(const AffineInGains& o);
  AffineInGains operator*(double s) const;
};

enum class RowKind { Clf, Cbf, Input };

struct ConstraintRow {
  RowKind kind = RowKind::Clf;
  int index = 0;  // facet row for Cbf, 2*axis + (negative ? 1 : 0) for Input
  Vec c_x;
  std::vector<std::vector<AffineInGains>> c_p;  // [landmark][grid point]
  AffineInGains r;

  std::string label() const;
};

ConstraintRow build_clf_row(const Vec& v, const Vec& o, const Dynamics& dyn,
                            double alpha_v, const GainLayout& layout,
                            const std::vector<GainBasis>& basis);

// One row per listed facet; barrier h_j = -(a_j x + b_j) >= 0 inside.
std::vector<ConstraintRow> build_cbf_rows(const Mat& normals, const Vec& offsets,
                                          const std::vector<int>& rows,
                                          const Dynamics& dyn, double alpha_h,
                                          const GainLayout& layout,
                                          const std::vector<GainBasis>& basis);

// |u_a| <= u_max as rows s e_a^T u - u_max <= 0.
std::vector<ConstraintRow> build_input_rows(double u_max, const GainLayout& layout,
                                            const std::vector<GainBasis>& basis);

double evaluate_row(const ConstraintRow& row, const Vec& gains, const Vec& x,
                    const std::vector<Vec>& pmfs);

// Concrete c_p vector for one landmark at given gains.
Vec concrete_cp(const ConstraintRow& row, int landmark, const Vec& gains);

}  // namespace safe_field::clfcbf

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace safe_field::measurement {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Robot-centered grid. P^vee index = sum_q j_q * prod_{r<q} n_r, so axis 0
// varies fastest (image rows run along axis 1).
struct GridSpec {
  std::vector<int> n;
  std::vector<double> width;

  int dim() const { return static_cast<int>(n.size()); }
  int points() const;
  double pitch(int q) const { return width[q] / n[q]; }
  std::vector<int> unravel(int index) const;
  int ravel(const std::vector<int>& idx) const;
  bool operator==(const GridSpec& o) const { return n == o.n && width == o.width; }
};

GridSpec make_grid(int n_per_axis, double width, int d = 2);
void validate(const GridSpec& spec);

struct PmfGrid {
  GridSpec spec;
  Vec mass;
};

struct ExpectationKernel {
  GridSpec spec;
  std::vector<Vec> theta;  // per-axis cell-centered coordinates
  Mat U;                   // d x n_p
};

struct UncertaintyBounds {
  double epsilon = 0.0;
  double sigma_m = 0.0;
};

struct FeasibilityReport {
  Vec mean_error;
  Vec mad;
  bool feasible = false;
};

// Mean rows: A'_x x + A_p P + b_p <= 0 encode l - x - eps <= U P <= l - x + eps.
struct ProbabilityBlocks {
  Mat A_p;   // 2d x n_p
  Mat A_x;   // 2d x d
  Vec b_p;   // 2d
  Mat U;     // for the MAD rows
  Vec landmark;
  double sigma_m = 0.0;

  // Residuals of the mean rows, then per axis: z_q^T P - sigma_m,
  // U_q - (l-x)_q 1 - z_q, -U_q + (l-x)_q 1 - z_q.
  Vec evaluate(const Vec& x, const Vec& P, const Mat& z) const;
  // Pointwise minimal z (d x n_p).
  Mat minimal_z(const Vec& x) const;
};

ExpectationKernel build_expectation_kernel(const GridSpec& spec);

PmfGrid make_delta_pmf(const GridSpec& spec, const Vec& y);

PmfGrid blur_pmf(const PmfGrid& p, const Vec& drift, double variance);

FeasibilityReport check_pmf_feasible(const PmfGrid& p, const ExpectationKernel& k,
                                     const UncertaintyBounds& bounds,
                                     const Vec& truth);

ProbabilityBlocks assemble_probability_constraints(const ExpectationKernel& k,
                                                   const UncertaintyBounds& bounds,
                                                   const Vec& landmark);

// Warns through the logger when a bound is below the grid pitch.
void warn_if_below_resolution(const GridSpec& spec, const UncertaintyBounds& b);

void write_pmf_csv(std::ostream& os, const PmfGrid& p);
PmfGrid read_pmf_csv(std::istream& is);

}  // namespace safe_field::measurement

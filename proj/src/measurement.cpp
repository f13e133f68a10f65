#include "safe_field/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "safe_field/errors.hpp"

namespace safe_field::measurement {

int GridSpec::points() const {
  int p = 1;
  for (int v : n) p *= v;
  return p;
}

std::vector<int> GridSpec::unravel(int index) const {
  std::vector<int> idx(n.size());
  for (size_t q = 0; q < n.size(); ++q) {
    idx[q] = index % n[q];
    index /= n[q];
  }
  return idx;
}

int GridSpec::ravel(const std::vector<int>& idx) const {
  int out = 0, stride = 1;
  for (size_t q = 0; q < n.size(); ++q) {
    out += idx[q] * stride;
    stride *= n[q];
  }
  return out;
}

GridSpec make_grid(int n_per_axis, double width, int d) {
  GridSpec g;
  g.n.assign(d, n_per_axis);
  g.width.assign(d, width);
  validate(g);
  return g;
}

void validate(const GridSpec& spec) {
  if (spec.n.empty() || spec.n.size() != spec.width.size()) {
    fail(ErrorKind::DimensionMismatch, "grid axes and widths disagree");
  }
  for (size_t q = 0; q < spec.n.size(); ++q) {
    if (spec.n[q] < 2) fail(ErrorKind::ConfigError, "grid needs n >= 2 per axis");
    if (!(spec.width[q] > 0.0)) fail(ErrorKind::ConfigError, "grid width must be positive");
  }
}

ExpectationKernel build_expectation_kernel(const GridSpec& spec) {
  validate(spec);
  ExpectationKernel k;
  k.spec = spec;
  const int d = spec.dim();
  for (int q = 0; q < d; ++q) {
    Vec th(spec.n[q]);
    for (int j = 0; j < spec.n[q]; ++j) {
      th(j) = spec.width[q] * (j + 0.5) / spec.n[q] - spec.width[q] / 2;
    }
    k.theta.push_back(th);
  }
  k.U.resize(d, spec.points());
  for (int i = 0; i < spec.points(); ++i) {
    const auto idx = spec.unravel(i);
    for (int q = 0; q < d; ++q) k.U(q, i) = k.theta[q](idx[q]);
  }
  return k;
}

PmfGrid make_delta_pmf(const GridSpec& spec, const Vec& y) {
  const int d = spec.dim();
  if (y.size() != d) fail(ErrorKind::DimensionMismatch, "observation dimension");
  std::vector<int> idx(d);
  for (int q = 0; q < d; ++q) {
    if (std::abs(y(q)) > spec.width[q] / 2 + 1e-12) {
      std::ostringstream os;
      os << "landmark displacement " << y(q) << " on axis " << q
         << " exceeds half width " << spec.width[q] / 2;
      fail(ErrorKind::LandmarkOutOfView, os.str());
    }
    // Nearest center; exact ties go to the lower index.
    const double s = (y(q) + spec.width[q] / 2) / spec.pitch(q) - 0.5;
    int j = static_cast<int>(std::ceil(s - 0.5));
    idx[q] = std::clamp(j, 0, spec.n[q] - 1);
  }
  PmfGrid p{spec, Vec::Zero(spec.points())};
  p.mass(spec.ravel(idx)) = 1.0;
  return p;
}

PmfGrid blur_pmf(const PmfGrid& p, const Vec& drift, double variance) {
  const GridSpec& spec = p.spec;
  const int d = spec.dim();
  std::vector<int> shift(d), radius(d);
  const double sd = std::sqrt(std::max(variance, 0.0));
  for (int q = 0; q < d; ++q) {
    shift[q] = static_cast<int>(std::lround(drift(q) / spec.pitch(q)));
    radius[q] = variance > 0.0
                    ? static_cast<int>(std::floor(3.0 * sd / spec.pitch(q)))
                    : 0;
  }
  // Kernel offsets inside the +-3 sd box.
  std::vector<std::vector<int>> offsets;
  std::vector<double> weights;
  {
    std::vector<int> cur(d);
    for (int q = 0; q < d; ++q) cur[q] = -radius[q];
    while (true) {
      double r2 = 0.0;
      for (int q = 0; q < d; ++q) {
        const double s = cur[q] * spec.pitch(q);
        r2 += s * s;
      }
      offsets.push_back(cur);
      weights.push_back(variance > 0.0 ? std::exp(-r2 / (2.0 * variance)) : 1.0);
      int q = 0;
      while (q < d && ++cur[q] > radius[q]) {
        cur[q] = -radius[q];
        ++q;
      }
      if (q == d) break;
    }
  }
  PmfGrid out{spec, Vec::Zero(spec.points())};
  for (int i = 0; i < spec.points(); ++i) {
    const double m = p.mass(i);
    if (m == 0.0) continue;
    auto idx = spec.unravel(i);
    std::vector<int> center(d);
    for (int q = 0; q < d; ++q) center[q] = std::clamp(idx[q] + shift[q], 0, spec.n[q] - 1);
    for (size_t k = 0; k < offsets.size(); ++k) {
      std::vector<int> t(d);
      bool inside = true;
      for (int q = 0; q < d; ++q) {
        t[q] = center[q] + offsets[k][q];
        if (t[q] < 0 || t[q] >= spec.n[q]) inside = false;
      }
      if (inside) out.mass(spec.ravel(t)) += m * weights[k];
    }
  }
  const double total = out.mass.sum();
  if (total > 0.0) out.mass /= total;
  return out;
}

FeasibilityReport check_pmf_feasible(const PmfGrid& p, const ExpectationKernel& k,
                                     const UncertaintyBounds& bounds,
                                     const Vec& truth) {
  if (!(p.spec == k.spec)) fail(ErrorKind::GridMismatch, "PMF and kernel grids differ");
  FeasibilityReport r;
  r.mean_error = k.U * p.mass - truth;
  const int d = static_cast<int>(truth.size());
  r.mad = Vec::Zero(d);
  for (int q = 0; q < d; ++q) {
    r.mad(q) = ((k.U.row(q).array() - truth(q)).abs() * p.mass.transpose().array()).sum();
  }
  r.feasible = (r.mean_error.array().abs() <= bounds.epsilon).all() &&
               (r.mad.array() <= bounds.sigma_m).all();
  return r;
}

ProbabilityBlocks assemble_probability_constraints(const ExpectationKernel& k,
                                                   const UncertaintyBounds& bounds,
                                                   const Vec& landmark) {
  const int d = k.spec.dim();
  const int np = k.spec.points();
  ProbabilityBlocks b;
  b.A_p.resize(2 * d, np);
  b.A_p << k.U, -k.U;
  b.A_x.resize(2 * d, d);
  b.A_x << Mat::Identity(d, d), -Mat::Identity(d, d);
  b.b_p.resize(2 * d);
  b.b_p << -landmark.array() - bounds.epsilon, landmark.array() - bounds.epsilon;
  b.U = k.U;
  b.landmark = landmark;
  b.sigma_m = bounds.sigma_m;
  return b;
}

Vec ProbabilityBlocks::evaluate(const Vec& x, const Vec& P, const Mat& z) const {
  const int d = static_cast<int>(x.size());
  const int np = static_cast<int>(P.size());
  Vec out(2 * d + d * (1 + 2 * np));
  out.head(2 * d) = A_x * x + A_p * P + b_p;
  int r = 2 * d;
  for (int q = 0; q < d; ++q) {
    const double y = landmark(q) - x(q);
    out(r++) = z.row(q).dot(P) - sigma_m;
    for (int i = 0; i < np; ++i) out(r++) = U(q, i) - y - z(q, i);
    for (int i = 0; i < np; ++i) out(r++) = -U(q, i) + y - z(q, i);
  }
  return out;
}

Mat ProbabilityBlocks::minimal_z(const Vec& x) const {
  Mat z(U.rows(), U.cols());
  for (int q = 0; q < U.rows(); ++q) {
    z.row(q) = (U.row(q).array() - (landmark(q) - x(q))).abs();
  }
  return z;
}

void warn_if_below_resolution(const GridSpec& spec, const UncertaintyBounds& b) {
  for (int q = 0; q < spec.dim(); ++q) {
    if (b.epsilon < spec.pitch(q) || b.sigma_m < spec.pitch(q)) {
      spdlog::warn("uncertainty bounds (eps={}, sigma_m={}) below grid pitch {} on axis {}",
                   b.epsilon, b.sigma_m, spec.pitch(q), q);
      return;
    }
  }
}

void write_pmf_csv(std::ostream& os, const PmfGrid& p) {
  const GridSpec& s = p.spec;
  if (s.dim() != 2) fail(ErrorKind::DimensionMismatch, "PMF CSV is 2D");
  os << std::setprecision(17);
  os << s.n[0] << ',' << s.n[1] << ',' << s.width[0] << ',' << s.width[1] << '\n';
  for (int r = 0; r < s.n[1]; ++r) {
    for (int c = 0; c < s.n[0]; ++c) {
      if (c) os << ',';
      os << p.mass(r * s.n[0] + c);
    }
    os << '\n';
  }
}

PmfGrid read_pmf_csv(std::istream& is) {
  std::string line;
  std::vector<double> vals;
  while (std::getline(is, line)) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty()) vals.push_back(std::stod(cell));
    }
  }
  if (vals.size() < 4) fail(ErrorKind::ConfigError, "PMF CSV header missing");
  GridSpec s;
  s.n = {static_cast<int>(vals[0]), static_cast<int>(vals[1])};
  s.width = {vals[2], vals[3]};
  validate(s);
  if (static_cast<int>(vals.size()) != 4 + s.points()) {
    fail(ErrorKind::ConfigError, "PMF CSV has the wrong number of values");
  }
  PmfGrid p{s, Vec(s.points())};
  for (int i = 0; i < s.points(); ++i) p.mass(i) = vals[4 + i];
  return p;
}

}  // namespace safe_field::measurement

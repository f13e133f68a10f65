#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "safe_field/synthesis.hpp"

namespace safe_field::verification {

using Vec = Eigen::VectorXd;

struct AdversaryResult {
  measurement::PmfGrid worst_pmf;
  double inner_value = 0.0;
  double dual_value = 0.0;  // b^T y of the solver's dual certificate
  int row = -1;
  Vec x;
};

// max c_p^T P over PMFs consistent with truth l - x: simplex, mean rows and
// the MAD rows with z at its pointwise minimum.
AdversaryResult adversarial_pmf(const Vec& c_p, const Vec& x,
                                const measurement::ExpectationKernel& kernel,
                                const measurement::UncertaintyBounds& bounds,
                                const Vec& landmark);

// Optimal value of the separately assembled inner dual: min over
// lambda_p >= 0, lambda_s, lambda_z >= 0 of
// lambda_p^T(-A'_x x - b_p) + lambda_s + sigma_m 1^T lambda_z subject to
// c_p - A_p^T lambda_p - lambda_s 1 - Z^T lambda_z <= 0.
double inner_dual_value(const Vec& c_p, const Vec& x,
                        const measurement::ExpectationKernel& kernel,
                        const measurement::UncertaintyBounds& bounds,
                        const Vec& landmark);

struct SamplingConfig {
  int count = 200;
  std::uint64_t seed = 1;
};

struct RowReport {
  std::string label;
  double delta = 0.0;
  double max_slack = 0.0;  // max over samples of (row value + delta)
  Vec worst_x;
  bool pass = true;
};

struct VerificationReport {
  int cell_id = 0;
  std::vector<RowReport> rows;
  int samples = 0;
  std::uint64_t seed = 0;
  bool pass = true;
};

inline constexpr double kSlackTol = 1e-6;

// Constraint rows of a controller rebuilt from its stored exit data.
std::vector<clfcbf::ConstraintRow> controller_rows(const synthesis::CellController& c,
                                                   const geometry::ConvexCell& cell,
                                                   const clfcbf::Dynamics& dyn);

// Worst-case value of row k at x: c_x^T x + r + sum over landmarks of the
// adversarial inner value.
double robust_row_value(const clfcbf::ConstraintRow& row, const synthesis::CellController& c,
                        const measurement::ExpectationKernel& kernel, const Vec& x);

VerificationReport verify_controller(const synthesis::CellController& c,
                                     const geometry::ConvexCell& cell,
                                     const SamplingConfig& sampling,
                                     const clfcbf::Dynamics& dyn = clfcbf::single_integrator(2));

// Throws VerificationFailed naming the worst row when the report fails.
void require_pass(const VerificationReport& r);

nlohmann::ordered_json report_to_json(const std::vector<VerificationReport>& rs);

}  // namespace safe_field::verification

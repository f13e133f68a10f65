#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "safe_field/clfcbf.hpp"
#include "safe_field/geometry.hpp"
#include "safe_field/lp_core.hpp"
#include "safe_field/measurement.hpp"
#include "safe_field/planning.hpp"

namespace safe_field::synthesis {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct SynthesisConfig {
  double alpha_v = 1.0;
  double alpha_h = 100.0;
  measurement::UncertaintyBounds bounds;
  measurement::GridSpec grid;
  std::vector<std::string> basis_names{"mean", "quadratic", "cosine"};
  double omega_clf = 1.0;
  double omega_cbf = 1.0;
  std::optional<double> u_max;
  bool goal_constraint = true;
  clfcbf::Dynamics dynamics = clfcbf::single_integrator(2);
  // Check recovered multipliers against every row of the assembled LP.
  bool check_assembled = true;
  // Also solve the machine-dualized LP and log any objective disagreement.
  bool cross_check = false;
};

enum class MarginKind { NonNegative, Free, Zero };

// Everything one cell's LP is built from.
struct CellProblem {
  geometry::ConvexCell cell;
  planning::ExitAssignment exit;
  std::vector<int> landmark_ids;
  std::vector<Vec> landmarks;
  std::vector<measurement::ExpectationKernel> kernels;
  std::vector<clfcbf::GainBasis> basis;
  std::vector<measurement::ProbabilityBlocks> blocks;
  measurement::UncertaintyBounds bounds;
  clfcbf::GainLayout layout;
  std::vector<clfcbf::ConstraintRow> rows;
  std::vector<double> omega;
  std::vector<MarginKind> margin;
  std::optional<std::vector<Vec>> goal_pmfs;
  bool check_assembled = true;
};

CellProblem build_cell_problem(const geometry::Environment& env,
                               const planning::ExitAssignment& exit,
                               const SynthesisConfig& config);

struct LandmarkMultipliers {
  Vec lambda_p;   // 2d
  double lambda_s = 0.0;
  Vec lambda_z;   // d
  Mat rho1, rho2; // d x n_p
  Mat beta;       // n_p x n_c
  Mat eta1, eta2; // d x n_p
};

struct RowMultipliers {
  double delta = 0.0;
  Vec lambda_x;
  std::vector<LandmarkMultipliers> landmarks;
};

// Variable indices of the assembled LP.
struct RowIndex {
  int delta = -1;
  std::vector<int> lambda_x;
  struct PerLandmark {
    std::vector<int> lambda_p;
    int lambda_s = -1;
    std::vector<int> lambda_z;
    std::vector<std::vector<int>> rho1, rho2;  // [q][i]
    std::vector<std::vector<int>> beta;        // [i][j]
    std::vector<std::vector<int>> eta1, eta2;  // [q][i]
  };
  std::vector<PerLandmark> landmarks;
};

struct AssembledLp {
  lp::StandardLp lp;
  std::vector<RowIndex> rows;
};

// Dimension formulas of the assembled LP, per constraint row k with n_c
// facets, d axes, n_p grid points and n_L landmarks:
//   variables = 1 + n_c + n_L (2d + 1 + d + 2 d n_p + n_p n_c + 2 d n_p)
//   ub rows   = 1 + n_L n_p
//   eq rows   = d + n_L (d n_p + d n_p + d n_p)
// plus the gain block (layout size) and n_u goal rows when present.
struct LpDimensions {
  int variables = 0;
  int ub_rows = 0;
  int eq_rows = 0;
};
LpDimensions expected_dimensions(const CellProblem& p);
// Header lines for the LP dump stating the dimension formulas.
std::vector<std::string> dimension_header(const CellProblem& p);

AssembledLp assemble_robust_lp(const CellProblem& p);

// Appends K_P P_goal + K_b = 0 on the gain block (gain variables come first).
void add_goal_constraint(lp::StandardLp& lp, const CellProblem& p);

// Exact reduced form: inner maxima over (x, z) by finite candidate sets.
struct ReducedLp {
  lp::StandardLp lp;
  std::vector<int> delta;
  std::vector<std::vector<std::vector<int>>> lambda_p;  // [k][L][r]
  std::vector<std::vector<int>> lambda_s;               // [k][L]
  std::vector<std::vector<std::vector<int>>> lambda_z;  // [k][L][q]
};
ReducedLp assemble_reduced_lp(const CellProblem& p);

// Candidate set for max over x in the cell of -sum_q w_q |x_q - a_q|, w >= 0:
// returns the Pareto-minimal |x - a| vectors.
std::vector<Vec> distance_candidates(const geometry::ConvexCell& cell, const Vec& a);

// Mechanical two-stage dualization of the bi-level description.
lp::StandardLp assemble_machine_lp(const CellProblem& p);

enum class SolveMethod { Reduced, Assembled, Machine };

struct CellController {
  int cell_id = 0;
  planning::ExitAssignment exit;
  std::vector<int> landmark_ids;
  std::vector<Vec> landmarks;
  std::vector<std::string> basis_names;
  measurement::GridSpec grid;
  clfcbf::Gains gains;
  std::vector<std::string> row_labels;
  std::vector<double> margins;
  std::vector<RowMultipliers> duals;
  double objective = 0.0;
  double alpha_v = 0.0;
  double alpha_h = 0.0;
  measurement::UncertaintyBounds bounds;
  std::optional<double> u_max;
  double assembled_residual = 0.0;
  lp::Status status = lp::Status::Optimal;
};

CellController synthesize_cell_controller(const CellProblem& p,
                                          SolveMethod method = SolveMethod::Reduced);

// Optimal objective only, for cross-checks between construction routes.
double optimal_objective(const CellProblem& p, SolveMethod method);

struct StackedLayout {
  std::vector<int> offsets;  // start of each landmark block in P_all
  int total = 0;
};
StackedLayout stack_landmarks(const std::vector<measurement::ExpectationKernel>& kernels);

std::vector<CellController> synthesize_environment(
    const geometry::Environment& env, const planning::HighLevelPlan& plan,
    const SynthesisConfig& config, const std::vector<int>& only_cells = {});

nlohmann::ordered_json controller_to_json(const CellController& c);
CellController controller_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json bundle_to_json(const std::vector<CellController>& cs);
std::vector<CellController> bundle_from_json(const nlohmann::ordered_json& j);

}  // namespace safe_field::synthesis

#pragma once

#include "safe_field/synthesis.hpp"

namespace safe_field::synthesis {

void add_gain_variables(lp::StandardLp& lp, const clfcbf::GainLayout& g);
int add_margin_variable(lp::StandardLp& lp, const CellProblem& p, int k);
void append_affine(std::vector<std::pair<int, double>>& terms,
                   const clfcbf::AffineInGains& e, double scale);

// Completes the multiplier record from the reduced solution.
std::vector<RowMultipliers> recover_multipliers(const CellProblem& p,
                                                const ReducedLp& r,
                                                const std::vector<double>& x);

// Point of the assembled LP built from gains and multipliers.
std::vector<double> assembled_point(const AssembledLp& a, const Vec& gains,
                                    const std::vector<RowMultipliers>& m);

}  // namespace safe_field::synthesis

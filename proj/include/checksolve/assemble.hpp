#pragma once

#include <string>
#include <vector>

#include "checksolve/model.hpp"
#include "checksolve/partition.hpp"

namespace checksolve {

/// Cell solutions concatenated on the union grid, zero at breakpoints and
/// domain endpoints, with global verification diagnostics.
struct GluedSolution {
    std::vector<double> global_nodes;   // includes a, breakpoints, b
    std::vector<double> values;         // same length; zero at breakpoints
    std::vector<double> breakpoints;    // partition breakpoints (size J+1)
    std::vector<int> signs;
    std::vector<double> cell_energies;
    std::vector<double> flux_left;      // per cell, 2nd-order estimates
    std::vector<double> flux_right;
    double total_energy = 0.0;
    double residual_dual_norm = 0.0;    // relative, filled by residual_norms
    std::vector<double> flux_jumps;     // oriented |u'(y-) - u'(y+)|
    std::vector<double> zeros;          // interior zero locations
    std::vector<double> stationarity_defects;

    int cell_count() const { return static_cast<int>(signs.size()); }
    double max_abs_flux() const;
};

/// Concatenates the cell solutions of a converged OuterState.
GluedSolution glue(const OuterState& state);

struct ResidualReport {
    double dual_norm_abs = 0.0;   // ||K u - w f(u) - load|| in the K^{-1} norm
    double dual_norm_rel = 0.0;   // divided by ||w f(u) + load|| in the same norm
    std::vector<double> flux_jumps;
};

/// Discrete weak residual of arbitrary nodal data on a grid with Dirichlet
/// endpoints (first/last node values are taken as boundary data and excluded
/// from the residual rows).
ResidualReport weak_residual(const ProblemSpec& spec,
                             const std::vector<double>& nodes,
                             const std::vector<double>& values);

/// Assembles the global weak residual of the glued solution on its union
/// grid and records the dual norm plus per-breakpoint flux jumps into the
/// glued solution. Returns the report.
ResidualReport residual_norms(const ProblemSpec& spec, GluedSolution& glued);

/// Boundary-term stationarity defects against the sine test fields
/// v_m(x) = sin(m pi (x-a)/(b-a)), m = 1..m_fields, normalized by the
/// largest boundary flux squared. Fills glued.stationarity_defects.
std::vector<double> stationarity_defect(const ProblemSpec& spec, GluedSolution& glued,
                                        int m_fields = 8);

/// Defect of one test field given its values at the interior breakpoints.
double stationarity_defect_for(const GluedSolution& glued,
                               const std::vector<double>& field_at_breakpoints);

struct LocalizationReport {
    bool ok = false;
    int required_zeros = 0;
    std::vector<double> matched_zeros;       // one per window when ok
    std::vector<bool> sign_pattern_ok;       // one per nodal region of e_k
    std::string message;
};

/// Verifies the zero localization and sign pattern forced by an adversarial
/// eigen-aligned forcing: h = k_eig - 1 zeros, the i-th within (b-a)/k_eig
/// of a + i (b-a)/k_eig, and on each nodal region of e_{k_eig} the solution
/// dips below zero (e_k > 0) or rises above zero (e_k < 0).
LocalizationReport zero_localization_check(const GluedSolution& glued, int k_eig,
                                           const ProblemSpec& spec);
/// Throwing form: raises ViolatedLocalization with the offending index.
void require_zero_localization(const GluedSolution& glued, int k_eig,
                               const ProblemSpec& spec);

} // namespace checksolve

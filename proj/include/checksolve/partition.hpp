#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "checksolve/cellsolve.hpp"
#include "checksolve/model.hpp"

namespace checksolve {

enum class OuterStatus { Converged, StalledOnBoundary, MaxIterations };

/// One fully solved partition: every cell's Nehari solution plus the
/// assembled outer diagnostics.
struct OuterState {
    Partition partition;
    std::vector<CellSolution> cells;
    double total_energy = 0.0;
    std::vector<double> flux_mismatches;  // | |u'_i(y_i)| - |u'_{i+1}(y_i)| |
    double L_bound = 0.0;
    double interior_margin = 0.0;         // L_bound - L(T)
    OuterStatus status = OuterStatus::Converged;
    int outer_iterations = 0;

    double lipschitz() const { return lipschitz_constant(partition); }
    double max_flux_mismatch() const;
    double max_flux() const;
    /// Recomputed sum of cell energies (no cached drift).
    double recompute_total() const;
};

struct OuterTraceRow {
    int iter;
    double total_energy;
    double lipschitz;
    double max_flux_mismatch;
    double interior_margin;
};

struct OuterOptions {
    double tol_flux = 1e-5;        // relative flux mismatch target
    double tol_outer = 1e-7;       // gradient norm <= tol_outer * (1 + |E|)
    int max_outer_iterations = 500;
    int multistart = 3;            // random feasible starts besides uniform
    std::uint64_t seed = 0;
    bool polish = true;            // flux-matching Newton after descent
    int max_remesh_rounds = 3;
    std::optional<Partition> theta_reference;  // restricted class center
    double theta_radius = 0.0;                 // d_k ball radius (with reference)
    std::function<void(const OuterTraceRow&)> trace;  // per-iteration sink
    SolverOptions cell;
};

/// Number of interior nodes per cell for a target global node spacing.
std::vector<int> cell_node_counts(const Partition& partition, double h_target);
/// Target spacing for "m interior nodes on a cell of length (b-a)/J".
double h_target_from_m(const ProblemSpec& spec, int J, int m_per_cell);

/// Solves every cell of the partition and assembles sums and mismatches.
/// Cell meshes take m_per_cell scaled by cell length (see h_target_from_m).
OuterState total_energy(const ProblemSpec& spec, const Partition& partition,
                        int m_per_cell, const SolverOptions& opts = {});
OuterState total_energy(const ProblemSpec& spec, const Partition& partition,
                        const std::vector<int>& m_cells,
                        const SolverOptions& opts = {});

/// d/dy_i of the total energy: 1/2 (u'_{i+1}(y_i)^2 - u'_i(y_i)^2).
std::vector<double> breakpoint_gradient(const OuterState& state);

/// Minimizes the total energy over breakpoints within the distortion box
/// {L(T) <= L_bound} (and, when set, the d_k ball around theta_reference)
/// by projected gradient descent with multistart, then a flux-matching
/// polish. Throws StalledOnBoundary / MaxOuterIterations on failure;
/// optimize_partition_state returns the labelled state instead.
OuterState optimize_partition(const ProblemSpec& spec, int k, int J, double L_bound,
                              int m_per_cell, const OuterOptions& opts = {});
OuterState optimize_partition_state(const ProblemSpec& spec, int k, int J,
                                    double L_bound, int m_per_cell,
                                    const OuterOptions& opts = {});

} // namespace checksolve

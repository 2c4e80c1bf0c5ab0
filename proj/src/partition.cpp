#include "checksolve/partition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "checksolve/errors.hpp"
#include "checksolve/parallel.hpp"

namespace checksolve {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Euclidean projection of lengths onto {l_i in [lo, hi], sum l_i = total}:
/// clamp(l_i - mu) with the shift mu found by bisection.
std::vector<double> project_lengths(std::vector<double> lengths, double lo, double hi,
                                    double total) {
    const std::size_t n = lengths.size();
    auto sum_at = [&](double mu) {
        double s = 0.0;
        for (double l : lengths) s += std::clamp(l - mu, lo, hi);
        return s;
    };
    double mu_lo = -(hi * n + total), mu_hi = hi * n + total;
    // sum_at is nonincreasing in mu
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (mu_lo + mu_hi);
        if (sum_at(mid) > total) mu_lo = mid; else mu_hi = mid;
    }
    const double mu = 0.5 * (mu_lo + mu_hi);
    for (double& l : lengths) l = std::clamp(l - mu, lo, hi);
    // distribute the roundoff-level sum defect over cells with room
    double defect = total;
    for (double l : lengths) defect -= l;
    for (std::size_t i = 0; i < n && defect != 0.0; ++i) {
        const double room = (defect > 0.0) ? hi - lengths[i] : lo - lengths[i];
        const double take = (defect > 0.0) ? std::min(defect, room)
                                           : std::max(defect, room);
        lengths[i] += take;
        defect -= take;
    }
    return lengths;
}

Partition partition_from_lengths(const ProblemSpec& spec, int k,
                                 const std::vector<double>& lengths) {
    std::vector<double> bps(lengths.size() + 1);
    bps[0] = spec.a;
    for (std::size_t i = 0; i < lengths.size(); ++i) bps[i + 1] = bps[i] + lengths[i];
    bps.back() = spec.b;
    return Partition(k, std::move(bps), +1);
}

} // namespace

double OuterState::max_flux_mismatch() const {
    double m = 0.0;
    for (double v : flux_mismatches) m = std::max(m, v);
    return m;
}

double OuterState::max_flux() const {
    double m = 0.0;
    for (const auto& c : cells)
        m = std::max({m, std::abs(c.flux_left), std::abs(c.flux_right)});
    return m;
}

double OuterState::recompute_total() const {
    double s = 0.0;
    for (const auto& c : cells) s += c.energy;
    return s;
}

std::vector<int> cell_node_counts(const Partition& partition, double h_target) {
    std::vector<int> ms(partition.cell_count());
    for (int i = 0; i < partition.cell_count(); ++i) {
        const int m =
            static_cast<int>(std::lround(partition.cell_length(i) / h_target)) - 1;
        ms[i] = std::max(3, m);
    }
    return ms;
}

double h_target_from_m(const ProblemSpec& spec, int J, int m_per_cell) {
    return (spec.length() / J) / (m_per_cell + 1);
}

OuterState total_energy(const ProblemSpec& spec, const Partition& partition,
                        const std::vector<int>& m_cells, const SolverOptions& opts) {
    const int J = partition.cell_count();
    OuterState state;
    state.partition = partition;
    state.cells.resize(J);
    parallel_for(static_cast<std::size_t>(J), [&](std::size_t i) {
        try {
            auto [grid, energy] = discretize_cell(spec, partition.breakpoints[i],
                                                  partition.breakpoints[i + 1],
                                                  m_cells[i]);
            auto ut = solve_tilde(energy, opts);
            state.cells[i] = solve_cell_nehari(energy, std::move(ut),
                                               partition.signs[i], opts);
        } catch (const CellTooLarge& e) {
            throw CellTooLarge(std::string(e.what()) + " [cell " +
                                   std::to_string(i) + "]",
                               static_cast<int>(i));
        }
    });
    state.total_energy = state.recompute_total();
    state.flux_mismatches.resize(J > 0 ? J - 1 : 0);
    for (int i = 0; i + 1 < J; ++i)
        state.flux_mismatches[i] = std::abs(std::abs(state.cells[i].flux_right) -
                                            std::abs(state.cells[i + 1].flux_left));
    return state;
}

OuterState total_energy(const ProblemSpec& spec, const Partition& partition,
                        int m_per_cell, const SolverOptions& opts) {
    const double ht = h_target_from_m(spec, partition.cell_count(), m_per_cell);
    return total_energy(spec, partition, cell_node_counts(partition, ht), opts);
}

std::vector<double> breakpoint_gradient(const OuterState& state) {
    const int J = state.partition.cell_count();
    std::vector<double> g(J > 0 ? J - 1 : 0);
    for (int i = 0; i + 1 < J; ++i) {
        const double fr = state.cells[i].flux_right;
        const double fl = state.cells[i + 1].flux_left;
        g[i] = 0.5 * (fl * fl - fr * fr);
    }
    return g;
}

namespace {

struct Descent {
    const ProblemSpec& spec;
    int k;
    double L_bound;
    double lo, hi;  // per-cell length box implied by L_bound
    std::vector<int> m_cells;
    const OuterOptions& opts;

    OuterState solve(const std::vector<double>& lengths) const {
        Partition part = partition_from_lengths(spec, k, lengths);
        return total_energy(spec, part, m_cells, opts.cell);
    }

    std::vector<double> feasible(std::vector<double> lengths) const {
        lengths = project_lengths(std::move(lengths), lo, hi, spec.length());
        if (opts.theta_reference && opts.theta_radius > 0.0) {
            Partition part = partition_from_lengths(spec, k, lengths);
            const double d =
                deformation_distance(part, *opts.theta_reference).distance_to_reference;
            if (d > opts.theta_radius) {
                // d_k is positively homogeneous in the displacement from the
                // center, so the radial retraction lands exactly on the sphere
                const double th = opts.theta_radius / d * (1.0 - 1e-14);
                const auto& ref = opts.theta_reference->breakpoints;
                for (std::size_t i = 0; i < lengths.size(); ++i) {
                    const double lref = ref[i + 1] - ref[i];
                    lengths[i] = lref + th * (lengths[i] - lref);
                }
            }
        }
        return lengths;
    }

    void trace(int iter, const OuterState& s) const {
        if (opts.trace)
            opts.trace(OuterTraceRow{iter, s.total_energy, s.lipschitz(),
                                     s.max_flux_mismatch(), L_bound - s.lipschitz()});
    }
};

double norm2(const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool outer_converged(const OuterState& s, const std::vector<double>& g,
                     const OuterOptions& opts) {
    if (norm2(g) <= opts.tol_outer * (1.0 + std::abs(s.total_energy))) return true;
    return s.max_flux_mismatch() <= opts.tol_flux * s.max_flux();
}

/// Projected-gradient descent from one start.
OuterState descend(const Descent& ctx, OuterState state, int& iters) {
    double alpha = 0.0;
    const double total_len = ctx.spec.length();
    iters = 0;
    for (int it = 0; it < ctx.opts.max_outer_iterations; ++it, iters = it) {
        auto g = breakpoint_gradient(state);
        ctx.trace(it, state);
        if (outer_converged(state, g, ctx.opts)) {
            state.status = OuterStatus::Converged;
            return state;
        }
        if (alpha == 0.0)
            alpha = 0.05 * total_len /
                    (state.partition.cell_count() * std::max(norm_inf(g), 1e-300));
        const double e0 = state.total_energy;
        bool accepted = false;
        for (int ls = 0; ls < 50 && !accepted; ++ls) {
            std::vector<double> bps = state.partition.breakpoints;
            for (std::size_t i = 0; i + 2 < bps.size(); ++i) bps[i + 1] -= alpha * g[i];
            std::vector<double> lengths(bps.size() - 1);
            bool positive = true;
            for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
                lengths[i] = bps[i + 1] - bps[i];
                if (!(lengths[i] > 0.0)) positive = false;
            }
            if (positive) {
                lengths = ctx.feasible(std::move(lengths));
                double move = 0.0, acc = ctx.spec.a;
                for (std::size_t i = 0; i + 1 < lengths.size(); ++i) {
                    acc += lengths[i];
                    move = std::max(move,
                                    std::abs(acc - state.partition.breakpoints[i + 1]));
                }
                if (move > 1e-16 * total_len) {
                    OuterState trial = ctx.solve(lengths);
                    if (trial.total_energy <=
                        e0 - (1e-4 / std::max(alpha, 1e-300)) * move * move) {
                        state = std::move(trial);
                        accepted = true;
                        alpha = std::min(alpha * 1.5, 1e6);
                    }
                }
            }
            if (!accepted) alpha *= 0.5;
        }
        if (!accepted) {
            auto g2 = breakpoint_gradient(state);
            if (outer_converged(state, g2, ctx.opts))
                state.status = OuterStatus::Converged;
            else if (state.lipschitz() >= ctx.L_bound * (1.0 - 1e-10))
                state.status = OuterStatus::StalledOnBoundary;
            else
                state.status = OuterStatus::MaxIterations;
            return state;
        }
    }
    state.status = (state.lipschitz() >= ctx.L_bound * (1.0 - 1e-10))
                       ? OuterStatus::StalledOnBoundary
                       : OuterStatus::MaxIterations;
    return state;
}

/// Flux-matching Newton polish: drives the breakpoint gradient to its
/// roundoff floor with a finite-difference tridiagonal Jacobian. Feasibility
/// is kept by projection; the energy may not rise beyond roundoff.
OuterState polish(const Descent& ctx, OuterState state) {
    const int J = state.partition.cell_count();
    if (J < 2) return state;
    const int n = J - 1;
    auto g = breakpoint_gradient(state);
    double best = norm_inf(g);
    for (int round = 0; round < 40; ++round) {
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                             (1.0 + state.max_flux() * state.max_flux());
        if (best <= floor) break;

        std::vector<std::array<double, 3>> cols(n);  // dg_{j-1,j,j+1}/dy_j
        const double delta = 1e-7 * ctx.spec.length() / J;
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
            std::vector<double> bps = state.partition.breakpoints;
            bps[j + 1] += delta;
            std::array<CellSolution, 2> local;
            for (std::size_t c = 0; c < 2; ++c) {
                const std::size_t ci = j + c;
                auto [grid, energy] = discretize_cell(ctx.spec, bps[ci], bps[ci + 1],
                                                      ctx.m_cells[ci]);
                auto ut = solve_tilde(energy, ctx.opts.cell);
                local[c] = solve_cell_nehari(energy, std::move(ut),
                                             state.partition.signs[ci], ctx.opts.cell);
            }
            auto flux_right = [&](std::size_t i) {
                if (i == j) return local[0].flux_right;
                if (i == j + 1) return local[1].flux_right;
                return state.cells[i].flux_right;
            };
            auto flux_left = [&](std::size_t i) {
                if (i == j) return local[0].flux_left;
                if (i == j + 1) return local[1].flux_left;
                return state.cells[i].flux_left;
            };
            for (int off = -1; off <= 1; ++off) {
                const long i = static_cast<long>(j) + off;
                if (i < 0 || i >= n) {
                    cols[j][off + 1] = 0.0;
                    continue;
                }
                const double fr = flux_right(static_cast<std::size_t>(i));
                const double fl = flux_left(static_cast<std::size_t>(i) + 1);
                const double gi = 0.5 * (fl * fl - fr * fr);
                cols[j][off + 1] = (gi - g[i]) / delta;
            }
        });
        std::vector<double> diag(n), lower(n > 1 ? n - 1 : 0), upper(n > 1 ? n - 1 : 0);
        for (int j = 0; j < n; ++j) {
            diag[j] = cols[j][1];
            if (j > 0) upper[j - 1] = cols[j][0];
            if (j + 1 < n) lower[j] = cols[j][2];
        }
        std::vector<double> rhs(n), step;
        for (int i = 0; i < n; ++i) rhs[i] = -g[i];
        if (!solve_tridiag_pivoting(diag, lower, upper, rhs, step)) break;

        bool improved = false;
        double tau = 1.0;
        for (int bt = 0; bt < 8 && !improved; ++bt, tau *= 0.5) {
            std::vector<double> bps = state.partition.breakpoints;
            for (int i = 0; i < n; ++i) bps[i + 1] += tau * step[i];
            std::vector<double> lengths(J);
            bool positive = true;
            for (int i = 0; i < J; ++i) {
                lengths[i] = bps[i + 1] - bps[i];
                if (!(lengths[i] > 0.0)) positive = false;
            }
            if (!positive) continue;
            lengths = ctx.feasible(std::move(lengths));
            OuterState trial = ctx.solve(lengths);
            auto gt = breakpoint_gradient(trial);
            const double gn = norm_inf(gt);
            if (gn < best &&
                trial.total_energy <=
                    state.total_energy + 1e-9 * (1.0 + std::abs(state.total_energy))) {
                state = std::move(trial);
                g = std::move(gt);
                best = gn;
                improved = true;
            }
        }
        if (!improved) break;
    }
    state.status = OuterStatus::Converged;
    return state;
}

bool state_better(const OuterState& a, const OuterState& b) {
    const bool ca = a.status == OuterStatus::Converged;
    const bool cb = b.status == OuterStatus::Converged;
    if (ca != cb) return ca;
    return a.total_energy < b.total_energy;
}

} // namespace

OuterState optimize_partition_state(const ProblemSpec& spec, int k, int J,
                                    double L_bound, int m_per_cell,
                                    const OuterOptions& opts) {
    spec.validate();
    check_partition_feasible(spec, k, J, L_bound);
    if (opts.theta_reference &&
        lipschitz_constant(*opts.theta_reference) > L_bound)
        throw InfeasiblePartition("theta reference violates the L bound",
                                  lipschitz_constant(*opts.theta_reference));

    Descent ctx{spec, k, L_bound, 1.0 / (k * L_bound), L_bound / k, {}, opts};
    const double ht = h_target_from_m(spec, J, m_per_cell);

    std::vector<std::vector<double>> starts{uniform_partition(spec, k, J).lengths()};
    std::mt19937_64 rng(opts.seed);
    for (int s = 0; s < opts.multistart; ++s) {
        std::vector<double> lengths(J);
        for (int i = 0; i < J; ++i)
            lengths[i] = ctx.lo + (ctx.hi - ctx.lo) * uniform01(rng);
        starts.push_back(
            project_lengths(std::move(lengths), ctx.lo, ctx.hi, spec.length()));
    }

    OuterState best;
    bool have_best = false;
    int total_iters = 0;
    std::vector<int> best_mesh;
    for (auto& lengths0 : starts) {
        Descent run = ctx;
        Partition start_part = partition_from_lengths(spec, k, lengths0);
        run.m_cells = cell_node_counts(start_part, ht);
        OuterState state = run.solve(run.feasible(lengths0));
        int iters = 0;
        state = descend(run, std::move(state), iters);
        total_iters += iters;
        if (state.status == OuterStatus::Converged && opts.polish)
            state = polish(run, std::move(state));
        if (!have_best || state_better(state, best)) {
            best = std::move(state);
            best_mesh = run.m_cells;
            have_best = true;
        }
    }

    // re-mesh: node counts follow the converged cell lengths
    for (int round = 0; round < opts.max_remesh_rounds; ++round) {
        auto fresh = cell_node_counts(best.partition, ht);
        if (fresh == best_mesh) break;
        Descent run = ctx;
        run.m_cells = fresh;
        OuterState state = run.solve(best.partition.lengths());
        int iters = 0;
        state = descend(run, std::move(state), iters);
        total_iters += iters;
        if (state.status == OuterStatus::Converged && opts.polish)
            state = polish(run, std::move(state));
        best = std::move(state);
        best_mesh = std::move(fresh);
    }

    best.L_bound = L_bound;
    best.interior_margin = L_bound - best.lipschitz();
    best.outer_iterations = total_iters;
    return best;
}

OuterState optimize_partition(const ProblemSpec& spec, int k, int J, double L_bound,
                              int m_per_cell, const OuterOptions& opts) {
    OuterState state = optimize_partition_state(spec, k, J, L_bound, m_per_cell, opts);
    if (state.status == OuterStatus::StalledOnBoundary) {
        std::ostringstream oss;
        oss << "optimize_partition: distortion bound active at convergence, L(T) = "
            << state.lipschitz() << " with L_bound = " << L_bound;
        throw StalledOnBoundary(oss.str(), state.lipschitz());
    }
    if (state.status == OuterStatus::MaxIterations)
        throw MaxOuterIterations("optimize_partition: outer iteration cap reached");
    return state;
}

} // namespace checksolve

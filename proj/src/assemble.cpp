#include "checksolve/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "checksolve/errors.hpp"
#include "checksolve/tridiag.hpp"

namespace checksolve {

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

double GluedSolution::max_abs_flux() const {
    double m = 0.0;
    for (double f : flux_left) m = std::max(m, std::abs(f));
    for (double f : flux_right) m = std::max(m, std::abs(f));
    return m;
}

GluedSolution glue(const OuterState& state) {
    GluedSolution g;
    g.breakpoints = state.partition.breakpoints;
    g.signs = state.partition.signs;
    const int J = state.partition.cell_count();
    g.cell_energies.resize(J);
    g.flux_left.resize(J);
    g.flux_right.resize(J);

    g.global_nodes.push_back(g.breakpoints.front());
    g.values.push_back(0.0);
    for (int i = 0; i < J; ++i) {
        const CellSolution& c = state.cells[i];
        g.cell_energies[i] = c.energy;
        g.flux_left[i] = c.flux_left;
        g.flux_right[i] = c.flux_right;
        for (int j = 0; j < c.grid.m; ++j) {
            g.global_nodes.push_back(c.grid.node(j));
            g.values.push_back(c.u[j]);
        }
        g.global_nodes.push_back(g.breakpoints[i + 1]);
        g.values.push_back(0.0);
    }
    g.total_energy = 0.0;
    for (double e : g.cell_energies) g.total_energy += e;

    // zeros: breakpoints once, plus interpolated sign changes inside cells
    for (std::size_t i = 1; i + 1 < g.breakpoints.size(); ++i)
        g.zeros.push_back(g.breakpoints[i]);
    for (std::size_t j = 0; j + 1 < g.global_nodes.size(); ++j) {
        const double a = g.values[j], b = g.values[j + 1];
        if (a * b < 0.0) {
            const double x =
                g.global_nodes[j] - a * (g.global_nodes[j + 1] - g.global_nodes[j]) /
                                        (b - a);
            g.zeros.push_back(x);
        }
    }
    std::sort(g.zeros.begin(), g.zeros.end());
    // collapse duplicates at breakpoint resolution
    const double tol = 1e-14 * (g.breakpoints.back() - g.breakpoints.front());
    std::vector<double> zs;
    for (double z : g.zeros)
        if (zs.empty() || z - zs.back() > tol) zs.push_back(z);
    g.zeros = std::move(zs);
    return g;
}

ResidualReport weak_residual(const ProblemSpec& spec,
                             const std::vector<double>& nodes,
                             const std::vector<double>& values) {
    const std::size_t n = nodes.size();
    if (n < 3 || values.size() != n)
        throw InvalidSpec("weak_residual: need >= 3 nodes and matching values");
    const std::size_t m = n - 2;  // interior rows
    SymTridiag K{std::vector<double>(m), std::vector<double>(m - 1)};
    std::vector<double> r(m), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double hl = nodes[i + 1] - nodes[i];
        const double hr = nodes[i + 2] - nodes[i + 1];
        K.diag[i] = 1.0 / hl + 1.0 / hr;
        if (i + 1 < m) K.off[i] = -1.0 / hr;
        const double w_i = 0.5 * (hl + hr);
        rhs[i] = w_i * (spec.f(values[i + 1]) + spec.w(nodes[i + 1]));
    }
    // K u over interior rows, with boundary values as data
    for (std::size_t i = 0; i < m; ++i) {
        const double hl = nodes[i + 1] - nodes[i];
        const double hr = nodes[i + 2] - nodes[i + 1];
        double v = K.diag[i] * values[i + 1];
        v -= values[i] / hl;
        v -= values[i + 2] / hr;
        r[i] = v - rhs[i];
    }
    TridiagLDLT fac(K);
    auto kinv_r = fac.solve(r);
    auto kinv_rhs = fac.solve(rhs);
    double rr = 0.0, ff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        rr += r[i] * kinv_r[i];
        ff += rhs[i] * kinv_rhs[i];
    }
    ResidualReport rep;
    rep.dual_norm_abs = std::sqrt(std::max(0.0, rr));
    rep.dual_norm_rel =
        rep.dual_norm_abs / std::max(std::sqrt(std::max(0.0, ff)),
                                     std::numeric_limits<double>::min());
    return rep;
}

ResidualReport residual_norms(const ProblemSpec& spec, GluedSolution& glued) {
    ResidualReport rep = weak_residual(spec, glued.global_nodes, glued.values);
    rep.flux_jumps.resize(glued.cell_count() > 0 ? glued.cell_count() - 1 : 0);
    for (int i = 0; i + 1 < glued.cell_count(); ++i)
        rep.flux_jumps[i] = std::abs(glued.flux_right[i] - glued.flux_left[i + 1]);
    glued.residual_dual_norm = rep.dual_norm_rel;
    glued.flux_jumps = rep.flux_jumps;
    return rep;
}

double stationarity_defect_for(const GluedSolution& glued,
                               const std::vector<double>& field_at_breakpoints) {
    const int J = glued.cell_count();
    if (static_cast<int>(field_at_breakpoints.size()) != J - 1)
        throw InvalidSpec("stationarity_defect_for: one field value per interior breakpoint");
    double s = 0.0;
    for (int i = 0; i + 1 < J; ++i) {
        const double fr = glued.flux_right[i];
        const double fl = glued.flux_left[i + 1];
        s += 0.5 * (fr * fr - fl * fl) * field_at_breakpoints[i];
    }
    return s;
}

std::vector<double> stationarity_defect(const ProblemSpec& spec, GluedSolution& glued,
                                        int m_fields) {
    const int J = glued.cell_count();
    const double len = spec.length();
    const double fmax = glued.max_abs_flux();
    const double denom = std::max(0.5 * fmax * fmax, std::numeric_limits<double>::min());
    std::vector<double> defects(m_fields, 0.0);
    for (int m = 1; m <= m_fields; ++m) {
        std::vector<double> field(J > 0 ? J - 1 : 0);
        for (int i = 0; i + 1 < J; ++i)
            field[i] = std::sin(m * kPi * (glued.breakpoints[i + 1] - spec.a) / len);
        defects[m - 1] = std::abs(stationarity_defect_for(glued, field)) / denom;
    }
    glued.stationarity_defects = defects;
    return defects;
}

LocalizationReport zero_localization_check(const GluedSolution& glued, int k_eig,
                                           const ProblemSpec& spec) {
    LocalizationReport rep;
    rep.required_zeros = k_eig - 1;
    const double a = spec.a, len = spec.length();
    const double width = len / k_eig;

    // greedy increasing assignment of zeros to the localization windows
    std::size_t cursor = 0;
    for (int i = 1; i <= rep.required_zeros; ++i) {
        const double center = a + width * i;
        bool found = false;
        for (std::size_t j = cursor; j < glued.zeros.size(); ++j) {
            const double z = glued.zeros[j];
            if (std::abs(z - center) < width) {
                rep.matched_zeros.push_back(z);
                cursor = j + 1;
                found = true;
                break;
            }
            if (z >= center + width) break;
        }
        if (!found) {
            std::ostringstream oss;
            oss << "no zero within " << width << " of " << center << " (index " << i
                << ")";
            rep.message = oss.str();
            return rep;
        }
    }

    // sign pattern on the nodal regions of e_k: where e_k > 0 the solution
    // must dip negative, where e_k < 0 it must rise positive
    for (int r = 0; r < k_eig; ++r) {
        const double lo = a + width * r, hi = a + width * (r + 1);
        const int esign = (r % 2 == 0) ? +1 : -1;  // e_k = sin(...) starts positive
        double umin = std::numeric_limits<double>::infinity();
        double umax = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < glued.global_nodes.size(); ++j) {
            const double x = glued.global_nodes[j];
            if (x > lo && x < hi) {
                umin = std::min(umin, glued.values[j]);
                umax = std::max(umax, glued.values[j]);
            }
        }
        const bool ok = (esign > 0) ? (umin < 0.0) : (umax > 0.0);
        rep.sign_pattern_ok.push_back(ok);
        if (!ok) {
            std::ostringstream oss;
            oss << "sign pattern violated on nodal region " << r + 1 << " ["
                << lo << ", " << hi << "]";
            rep.message = oss.str();
            return rep;
        }
    }
    rep.ok = true;
    return rep;
}

void require_zero_localization(const GluedSolution& glued, int k_eig,
                               const ProblemSpec& spec) {
    LocalizationReport rep = zero_localization_check(glued, k_eig, spec);
    if (!rep.ok) {
        const int idx = static_cast<int>(rep.matched_zeros.size()) + 1;
        throw ViolatedLocalization("zero localization failed: " + rep.message, idx);
    }
}

} // namespace checksolve

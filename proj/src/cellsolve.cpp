#include "checksolve/cellsolve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include "checksolve/errors.hpp"

namespace checksolve {

namespace {

constexpr double kPi = 3.14159265358979323846;

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

std::atomic<long> g_multibracket{0};

} // namespace

std::vector<double> CellGrid::nodes() const {
    std::vector<double> xs(m);
    for (int j = 0; j < m; ++j) xs[j] = node(j);
    return xs;
}

DiscreteEnergy::DiscreteEnergy(const ProblemSpec& spec, CellGrid grid)
    : spec_(spec),
      grid_(grid),
      stiffness_{std::vector<double>(grid.m, 2.0 / grid.h),
                 std::vector<double>(grid.m > 0 ? grid.m - 1 : 0, -1.0 / grid.h)},
      load_(grid.m),
      p_(spec.p),
      k_factor_(stiffness_) {
    for (int j = 0; j < grid_.m; ++j) load_[j] = spec_.w(grid_.node(j));
}

double DiscreteEnergy::energy(std::span<const double> u) const {
    const int m = grid_.m;
    const double h = grid_.h;
    double quad = 0.0;
    // 1/2 u^T K u for the tridiagonal stiffness, accumulated elementwise
    double prev = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double cur = (j < m) ? u[j] : 0.0;
        const double d = cur - prev;
        quad += d * d;
        prev = cur;
    }
    quad *= 0.5 / h;
    double nl = 0.0, fw = 0.0;
    for (int j = 0; j < m; ++j) {
        nl += potential(u[j]);
        fw += load_[j] * u[j];
    }
    return quad - h * nl - h * fw;
}

void DiscreteEnergy::gradient(std::span<const double> u, std::span<double> g) const {
    stiffness_.mul(u, g);
    const double h = grid_.h;
    for (int j = 0; j < grid_.m; ++j) g[j] -= h * (f(u[j]) + load_[j]);
}

std::vector<double> DiscreteEnergy::gradient(std::span<const double> u) const {
    std::vector<double> g(u.size());
    gradient(u, g);
    return g;
}

SymTridiag DiscreteEnergy::hessian(std::span<const double> u) const {
    SymTridiag hss = stiffness_;
    const double h = grid_.h;
    for (int j = 0; j < grid_.m; ++j) hss.diag[j] -= h * fprime(u[j]);
    return hss;
}

double DiscreteEnergy::lp1_mass(std::span<const double> u) const {
    double s = 0.0;
    for (int j = 0; j < grid_.m; ++j) s += std::pow(std::abs(u[j]), p_ + 1.0);
    return grid_.h * s;
}

std::vector<double> DiscreteEnergy::stiffness_solve(std::span<const double> r) const {
    return k_factor_.solve(r);
}

double DiscreteEnergy::dual_norm(std::span<const double> r) const {
    auto x = k_factor_.solve(r);
    return std::sqrt(std::max(0.0, dot(r, x)));
}

double DiscreteEnergy::rhs_dual_norm(std::span<const double> u) const {
    std::vector<double> rhs(grid_.m);
    for (int j = 0; j < grid_.m; ++j) rhs[j] = grid_.h * (f(u[j]) + load_[j]);
    return dual_norm(rhs);
}

std::vector<double> DiscreteEnergy::first_eigenvector(int sign) const {
    std::vector<double> v(grid_.m);
    for (int j = 0; j < grid_.m; ++j)
        v[j] = sign * std::sin(kPi * (j + 1) / (grid_.m + 1));
    return v;
}

std::pair<CellGrid, DiscreteEnergy> discretize_cell(const ProblemSpec& spec,
                                                    double x_left, double x_right,
                                                    int m) {
    spec.validate();
    if (m < 3) throw InvalidSpec("discretize_cell: requires m >= 3 interior nodes");
    const double len = x_right - x_left;
    if (!(len > 10.0 * std::numeric_limits<double>::epsilon() * spec.length())) {
        std::ostringstream oss;
        oss << "degenerate cell [" << x_left << ", " << x_right << "]";
        throw DegenerateCell(oss.str());
    }
    CellGrid grid{x_left, x_right, m, len / (m + 1)};
    return {grid, DiscreteEnergy(spec, grid)};
}

std::vector<double> solve_tilde(const DiscreteEnergy& energy, const SolverOptions& opts) {
    const int m = energy.grid().m;
    std::vector<double> u(m, 0.0);
    const int max_newton = 200;
    for (int it = 0; it <= max_newton; ++it) {
        auto g = energy.gradient(u);
        const double res = energy.dual_norm(g);
        const double scale = 1.0 + energy.rhs_dual_norm(u);
        TridiagLDLT fac(energy.hessian(u));
        if (!fac.pd())
            throw HessianNotPD("solve_tilde: Hessian lost positive definiteness; "
                               "cell too large for the local solve");
        if (res <= opts.tol_newton * scale) {
            const double mass = energy.lp1_mass(u);
            if (!(mass < 1.0)) {
                std::ostringstream oss;
                oss << "solve_tilde: lp1 mass " << mass << " >= 1; cell too large";
                throw MassConstraintViolated(oss.str(), mass);
            }
            return u;
        }
        if (it == max_newton) break;
        for (double& gi : g) gi = -gi;
        auto du = fac.solve(g);
        const double slope = -dot(g, du);  // g here is -grad
        const double e0 = energy.energy(u);
        double t = 1.0;
        std::vector<double> trial(m);
        for (int ls = 0; ls < 60; ++ls) {
            for (int j = 0; j < m; ++j) trial[j] = u[j] + t * du[j];
            if (energy.energy(trial) <= e0 + opts.armijo_slope * t * slope) break;
            t *= opts.armijo_factor;
        }
        u = trial;
    }
    throw MaxIterations("solve_tilde: damped Newton did not converge");
}

namespace {

/// phi'(t) for phi(t) = E(u_tilde + t d).
double ray_dphi(const DiscreteEnergy& energy, std::span<const double> ut,
                std::span<const double> d, double a_kdd, double b_lin, double t,
                std::vector<double>& scratch) {
    const int m = energy.grid().m;
    const double h = energy.grid().h;
    double nl = 0.0;
    for (int j = 0; j < m; ++j) nl += energy.f(ut[j] + t * d[j]) * d[j];
    (void)scratch;
    return a_kdd * t + b_lin - h * nl;
}

double ray_d2phi(const DiscreteEnergy& energy, std::span<const double> ut,
                 std::span<const double> d, double a_kdd, double t) {
    const int m = energy.grid().m;
    const double h = energy.grid().h;
    double nl = 0.0;
    for (int j = 0; j < m; ++j) nl += energy.fprime(ut[j] + t * d[j]) * d[j] * d[j];
    return a_kdd - h * nl;
}

} // namespace

std::pair<double, double> ray_maximize(const DiscreteEnergy& energy,
                                       std::span<const double> u_tilde,
                                       std::span<const double> d) {
    const int m = energy.grid().m;
    double dmax = 0.0;
    for (int j = 0; j < m; ++j) dmax = std::max(dmax, std::abs(d[j]));
    if (dmax == 0.0) throw NoInteriorMax("ray_maximize: zero direction");

    // phi'(t) = <K d, d> t + <K u_tilde - h(f-part...), d> - h sum f(ut + t d) d.
    auto kd = energy.stiffness().mul(d);
    const double a_kdd = dot(kd, d);
    auto kut = energy.stiffness().mul(u_tilde);
    double b_lin = dot(kut, d);
    const double h = energy.grid().h;
    for (int j = 0; j < m; ++j) b_lin -= h * energy.load()[j] * d[j];

    std::vector<double> scratch;
    auto dphi = [&](double t) {
        return ray_dphi(energy, u_tilde, d, a_kdd, b_lin, t, scratch);
    };

    // bracket a descending zero of phi'
    double t_hi = 1.0;
    int guard = 0;
    while (dphi(t_hi) > 0.0) {
        t_hi *= 2.0;
        if (++guard > 200) throw NoInteriorMax("ray_maximize: phi' > 0 on search range");
    }
    double t_lo = t_hi * 0.5;
    guard = 0;
    while (t_lo > 0.0 && dphi(t_lo) <= 0.0) {
        t_hi = t_lo;
        t_lo *= 0.5;
        if (++guard > 120) throw NoInteriorMax("ray_maximize: no interior maximum");
    }

    // safeguarded Newton on phi'
    double t = 0.5 * (t_lo + t_hi);
    for (int it = 0; it < 200; ++it) {
        const double g1 = dphi(t);
        if (g1 > 0.0) t_lo = t; else t_hi = t;
        const double g2 = ray_d2phi(energy, u_tilde, d, a_kdd, t);
        double t_next = (g2 < 0.0) ? t - g1 / g2 : 0.5 * (t_lo + t_hi);
        if (!(t_next > t_lo && t_next < t_hi)) t_next = 0.5 * (t_lo + t_hi);
        if (std::abs(t_next - t) <= 1e-15 * t_next) { t = t_next; break; }
        t = t_next;
        if (t_hi - t_lo <= 1e-15 * t_hi) break;
    }

    if (!(ray_d2phi(energy, u_tilde, d, a_kdd, t) < 0.0))
        throw NoInteriorMax("ray_maximize: non-concave stationary point");

    std::vector<double> v(m);
    for (int j = 0; j < m; ++j) v[j] = u_tilde[j] + t * d[j];
    const double value = energy.energy(v);

    // detect further maxima beyond the bracket (logged, never chosen)
    double probe = 4.0 * t;
    for (int i = 0; i < 4; ++i, probe *= 4.0) {
        for (int j = 0; j < m; ++j) v[j] = u_tilde[j] + probe * d[j];
        if (energy.energy(v) > value) {
            g_multibracket.fetch_add(1, std::memory_order_relaxed);
            break;
        }
    }
    return {t, value};
}

long ray_multibracket_count() { return g_multibracket.load(); }

namespace {

void cone_project(std::span<const double> ut, int sign, std::span<double> u) {
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double d = sign * (u[j] - ut[j]);
        u[j] = ut[j] + sign * std::max(d, 0.0);
    }
}

double cone_violation(std::span<const double> ut, int sign, std::span<const double> u) {
    double worst = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
        worst = std::min(worst, static_cast<double>(sign * (u[j] - ut[j])));
    return worst;  // <= 0; 0 means inside the cone
}

} // namespace

CellSolution solve_cell_nehari(const DiscreteEnergy& energy,
                               std::vector<double> u_tilde, int sign,
                               const SolverOptions& opts) {
    if (sign != 1 && sign != -1) throw InvalidSpec("solve_cell_nehari: sign must be +-1");
    const int m = energy.grid().m;

    CellSolution sol;
    sol.grid = energy.grid();
    sol.sign = sign;
    sol.energy_tilde = energy.energy(u_tilde);
    sol.lp1_mass_tilde = energy.lp1_mass(u_tilde);

    auto d0 = energy.first_eigenvector(sign);
    auto [t0, val0] = ray_maximize(energy, u_tilde, d0);
    std::vector<double> u(m);
    for (int j = 0; j < m; ++j) u[j] = u_tilde[j] + t0 * d0[j];

    double alpha = 1.0;
    bool converged = false;
    double rel = std::numeric_limits<double>::infinity();
    std::vector<double> v(m), dd(m);

    for (int it = 0; it < opts.max_iterations; ++it) {
        auto g = energy.gradient(u);
        auto gs = energy.stiffness_solve(g);
        const double rn2 = dot(g, gs);
        const double rn = std::sqrt(std::max(0.0, rn2));
        const double den = std::max(energy.rhs_dual_norm(u),
                                    std::numeric_limits<double>::min());
        rel = rn / den;
        if (rel <= opts.tol_grad) { converged = true; break; }

        // Newton polish once the basin is reached
        if (rel <= 1e-3) {
            std::vector<double> u_new = u;
            double best = rn;
            for (int nit = 0; nit < 60; ++nit) {
                auto hess = energy.hessian(u_new);
                std::vector<double> lower(hess.off), upper(hess.off), rhs(m), step;
                auto gn = energy.gradient(u_new);
                for (int j = 0; j < m; ++j) rhs[j] = -gn[j];
                if (!solve_tridiag_pivoting(hess.diag, lower, upper, rhs, step)) break;
                std::vector<double> trial(m);
                for (int j = 0; j < m; ++j) trial[j] = u_new[j] + step[j];
                auto gt = energy.gradient(trial);
                const double rt = energy.dual_norm(gt);
                if (rt >= best) break;
                u_new = trial;
                best = rt;
                if (best <= 1e-15 * den) break;
            }
            double scale = 0.0;
            for (int j = 0; j < m; ++j)
                scale = std::max(scale, std::abs(u_new[j] - u_tilde[j]));
            if (best < rn && cone_violation(u_tilde, sign, u_new) >= -1e-12 * scale) {
                u = u_new;
                cone_project(u_tilde, sign, u);  // clip roundoff-level dips
                auto gg = energy.gradient(u);
                rel = energy.dual_norm(gg) / den;
                if (rel <= opts.tol_grad) { converged = true; break; }
                continue;  // gradient is stale, restart the iteration
            }
        }

        // projected gradient step in the stiffness metric
        const double e0 = energy.energy(u);
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int j = 0; j < m; ++j) v[j] = u[j] - alpha * gs[j];
            cone_project(u_tilde, sign, v);
            double dmax = 0.0;
            for (int j = 0; j < m; ++j) {
                dd[j] = v[j] - u_tilde[j];
                dmax = std::max(dmax, std::abs(dd[j]));
            }
            if (dmax > 0.0) {
                auto [ts, val] = ray_maximize(energy, u_tilde, dd);
                for (int j = 0; j < m; ++j) v[j] = u_tilde[j] + ts * dd[j];
                if (val <= e0 - opts.armijo_slope * alpha * rn2) {
                    u = v;
                    accepted = true;
                    alpha = std::min(alpha * 1.5, 64.0);
                    break;
                }
            }
            alpha *= opts.armijo_factor;
        }
        if (!accepted) {
            // no descent at the smallest step; accept only if already near
            if (rel <= 10.0 * opts.tol_grad) { converged = true; break; }
            std::ostringstream oss;
            oss << "solve_cell_nehari: line search stalled, relative residual " << rel;
            throw MaxIterations(oss.str(), rel);
        }
    }
    if (!converged) {
        std::ostringstream oss;
        oss << "solve_cell_nehari: no convergence, relative residual " << rel;
        throw MaxIterations(oss.str(), rel);
    }

    // final ray reprojection nails the natural constraint
    for (int j = 0; j < m; ++j) dd[j] = u[j] - u_tilde[j];
    auto [ts, val] = ray_maximize(energy, u_tilde, dd);
    for (int j = 0; j < m; ++j) u[j] = u_tilde[j] + ts * dd[j];

    sol.u = u;
    sol.u_tilde = std::move(u_tilde);
    sol.energy = energy.energy(u);
    auto g = energy.gradient(u);
    double resid = 0.0;
    for (int j = 0; j < m; ++j) resid += g[j] * (u[j] - sol.u_tilde[j]);
    sol.nehari_residual = std::abs(resid);
    sol.grad_norm = energy.dual_norm(g) /
                    std::max(energy.rhs_dual_norm(u), std::numeric_limits<double>::min());
    auto [fl, fr] = cell_flux(sol.grid, u);
    sol.flux_left = fl;
    sol.flux_right = fr;
    return sol;
}

double constrained_infimum(const DiscreteEnergy& energy, const SolverOptions& opts) {
    const int m = energy.grid().m;
    const double h = energy.grid().h;
    const double pp = energy.p();

    auto normalize = [&](std::vector<double>& u) {
        const double mass = energy.lp1_mass(u);
        const double s = std::pow(mass, -1.0 / (pp + 1.0));
        for (double& x : u) x *= s;
    };

    auto u = energy.first_eigenvector(+1);
    normalize(u);

    std::vector<double> n(m), r(m), v(m);
    double alpha = 1.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        auto g = energy.gradient(u);
        for (int j = 0; j < m; ++j)
            n[j] = (pp + 1.0) * h * std::pow(std::abs(u[j]), pp - 1.0) * u[j];
        auto kin = energy.stiffness_solve(n);
        const double lam = dot(g, kin) / std::max(dot(n, kin),
                                                  std::numeric_limits<double>::min());
        for (int j = 0; j < m; ++j) r[j] = g[j] - lam * n[j];
        const double rn2 = dot(r, energy.stiffness_solve(r));
        const double rn = std::sqrt(std::max(0.0, rn2));
        const double den = 1.0 + energy.rhs_dual_norm(u);
        if (rn <= opts.tol_grad * den) return energy.energy(u);

        auto rs = energy.stiffness_solve(r);
        const double e0 = energy.energy(u);
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int j = 0; j < m; ++j) v[j] = u[j] - alpha * rs[j];
            normalize(v);
            if (energy.energy(v) <= e0 - opts.armijo_slope * alpha * rn2) {
                u = v;
                alpha = std::min(alpha * 1.5, 64.0);
                accepted = true;
                break;
            }
            alpha *= opts.armijo_factor;
        }
        if (!accepted) return energy.energy(u);  // stationary to roundoff
    }
    throw MaxIterations("constrained_infimum: no convergence");
}

std::pair<double, double> cell_flux(const CellGrid& grid, std::span<const double> u) {
    const double h = grid.h;
    const int m = grid.m;
    const double fl = (4.0 * u[0] - u[1]) / (2.0 * h);
    const double fr = (u[m - 2] - 4.0 * u[m - 1]) / (2.0 * h);
    return {fl, fr};
}

std::pair<double, double> cell_flux(const CellSolution& solution) {
    return cell_flux(solution.grid, solution.u);
}

} // namespace checksolve

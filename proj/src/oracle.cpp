#include "checksolve/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "checksolve/cellsolve.hpp"
#include "checksolve/errors.hpp"

namespace checksolve::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOverflowGuard = 1e8;

} // namespace

double ShootingResult::evaluate(double x) const {
    if (xs.size() < 2) return us.empty() ? 0.0 : us.front();
    if (x <= xs.front()) return us.front();
    if (x >= xs.back()) return us.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double h = xs[i + 1] - xs[i];
    const double s = (x - xs[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * us[i] + h10 * h * dus[i] + h01 * us[i + 1] + h11 * h * dus[i + 1];
}

ShootingResult shoot_interval(const ProblemSpec& spec, double x0, double x1,
                              double slope, double step) {
    spec.validate();
    if (!(step > 0.0)) throw InvalidSpec("shoot: step must be positive");
    const double len = x1 - x0;
    const long n = std::max(1L, std::lround(len / step));
    const double h = len / static_cast<double>(n);

    ShootingResult res;
    res.slope = slope;
    res.xs.reserve(n + 1);
    res.us.reserve(n + 1);
    res.dus.reserve(n + 1);

    auto acc = [&spec](double x, double u) { return -(spec.f(u) + spec.w(x)); };

    double u = 0.0, v = slope, x = x0;
    res.xs.push_back(x);
    res.us.push_back(u);
    res.dus.push_back(v);
    for (long i = 0; i < n; ++i) {
        const double k1u = v, k1v = acc(x, u);
        const double k2u = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h, u + 0.5 * h * k1u);
        const double k3u = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h, u + 0.5 * h * k2u);
        const double k4u = v + h * k3v, k4v = acc(x + h, u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        x = x0 + (i + 1) * h;
        if (!std::isfinite(u) || std::abs(u) > kOverflowGuard) {
            std::ostringstream oss;
            oss << "shooting trajectory blew up near x = " << x;
            throw Overflow(oss.str(), x);
        }
        res.xs.push_back(x);
        res.us.push_back(u);
        res.dus.push_back(v);
    }
    res.end_value = u;
    int zc = 0;
    double prev = 0.0;
    for (double val : res.us) {
        if (val == 0.0) continue;
        if (prev != 0.0 && prev * val < 0.0) ++zc;
        prev = val;
    }
    res.zero_count = zc;
    return res;
}

ShootingResult shoot(const ProblemSpec& spec, double slope, double step) {
    return shoot_interval(spec, spec.a, spec.b, slope, step);
}

ShootingMatch shooting_match(const ProblemSpec& spec, const GluedSolution& glued,
                             double step) {
    // initial slope of the glued profile at a, second-order one-sided
    const double h = glued.global_nodes[1] - glued.global_nodes[0];
    const double slope =
        (4.0 * glued.values[1] - glued.values[2]) / (2.0 * h);
    ShootingResult traj = shoot(spec, slope, step);

    ShootingMatch match;
    match.end_value = traj.end_value;
    for (std::size_t j = 0; j < glued.global_nodes.size(); ++j) {
        const double diff = std::abs(glued.values[j] - traj.evaluate(glued.global_nodes[j]));
        match.sup_error = std::max(match.sup_error, diff);
    }
    match.zeros_shooting = traj.zero_count;
    match.zeros_glued = static_cast<int>(glued.zeros.size());
    match.zero_count_match = (match.zeros_shooting == match.zeros_glued);
    return match;
}

AsymmetrySplit compute_split(const ProblemSpec& spec, int m_unit_cell,
                             int curve_samples) {
    spec.validate();
    // one-signed unit ground state at c = 1 via the cell solver
    ProblemSpec unit;
    unit.a = 0.0;
    unit.b = 1.0;
    unit.p = spec.p;
    unit.c_plus = 1.0;
    unit.c_minus = 1.0;
    auto [grid, energy] = discretize_cell(unit, 0.0, 1.0, m_unit_cell);
    auto ut = solve_tilde(energy);
    const double e1 = solve_cell_nehari(energy, std::move(ut), +1).energy;

    const double alpha = (spec.p + 3.0) / (spec.p - 1.0);
    const double beta = 2.0 / (spec.p - 1.0);
    const double ap = std::pow(spec.c_plus, -beta);
    const double am = std::pow(spec.c_minus, -beta);
    auto curve = [&](double t) {
        return e1 * (ap / std::pow(t, alpha) + am / std::pow(2.0 - t, alpha));
    };

    // golden-section minimization of the strictly convex split objective
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 1e-9, hi = 2.0 - 1e-9;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = curve(x1), f2 = curve(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = curve(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = curve(x2);
        }
    }

    AsymmetrySplit split;
    split.unit_cell_energy = e1;
    split.t_hat = 0.5 * (lo + hi);
    split.L_hat = 1.0 / std::min(split.t_hat, 2.0 - split.t_hat);
    split.energy_curve.reserve(curve_samples);
    const double t0 = 1e-3, t1 = 2.0 - 1e-3;
    int minima = 0;
    double prev2 = 0.0, prev1 = 0.0;
    for (int i = 0; i < curve_samples; ++i) {
        const double t = t0 + (t1 - t0) * i / (curve_samples - 1);
        const double v = curve(t);
        split.energy_curve.emplace_back(t, v);
        if (i >= 2 && prev1 < prev2 && prev1 < v) ++minima;
        prev2 = prev1;
        prev1 = v;
    }
    split.unique_minimizer = (minima <= 1);
    return split;
}

EigenData eigen_data(const ProblemSpec& spec, int k_eig) {
    spec.validate();
    if (k_eig < 1) throw InvalidSpec("eigen_data: k_eig must be >= 1");
    EigenData d;
    const double len = spec.length();
    d.lambda = std::pow(k_eig * kPi / len, 2.0);
    const double a = spec.a;
    d.e = [k_eig, a, len](double x) { return std::sin(k_eig * kPi * (x - a) / len); };
    return d;
}

double discrete_eigenvalue(int m, double length, int k_eig) {
    const double h = length / (m + 1);
    const double s = std::sin(0.5 * k_eig * kPi * h / length);
    return 4.0 * s * s / (h * h);
}

double forcing_threshold(double lambda, double p, double cbar) {
    const double t_star = std::pow(lambda / (cbar * p), 1.0 / (p - 1.0));
    return lambda * t_star * (1.0 - 1.0 / p);
}

ForcingSpec adversarial_forcing(const ProblemSpec& spec, int k_eig, double margin) {
    spec.validate();
    if (!(margin > 0.0))
        throw InvalidSpec("adversarial_forcing: margin must be positive");
    const double cbar = std::min(spec.c_plus, spec.c_minus);
    const double lambda = eigen_data(spec, k_eig).lambda;
    const double M = forcing_threshold(lambda, spec.p, cbar);
    ForcingSpec w = ForcingSpec::sign_of_eigenfunction(k_eig, M + margin);

    // alignment and strict threshold, asserted on a fine grid
    const EigenData ed = eigen_data(spec, k_eig);
    for (int i = 0; i < 10000; ++i) {
        const double x = spec.a + spec.length() * (i + 0.5) / 10000.0;
        const double wx = w.evaluate(x, spec.a, spec.b);
        const double ek = ed.e(x);
        if (ek * wx < 0.0)
            throw InvalidSpec("adversarial_forcing: alignment violated");
        if (ek != 0.0 && !(std::abs(wx) > M))
            throw InvalidSpec("adversarial_forcing: threshold not strict");
    }
    return w;
}

SignConditionReport verify_sign_conditions(const ProblemSpec& spec, double d_lo,
                                           double d_hi, double lambda1,
                                           int scan_points) {
    spec.validate();
    double w_min = std::numeric_limits<double>::infinity();
    double w_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < scan_points; ++i) {
        const double x = d_lo + (d_hi - d_lo) * (i + 0.5) / scan_points;
        const double wx = spec.w(x);
        w_min = std::min(w_min, wx);
        w_max = std::max(w_max, wx);
    }
    // inf_{t>=0} (c+ t^p - lambda1 t) = -max_{t>=0}(lambda1 t - c+ t^p)
    const double m_plus = forcing_threshold(lambda1, spec.p, spec.c_plus);
    const double m_minus = forcing_threshold(lambda1, spec.p, spec.c_minus);
    SignConditionReport rep;
    rep.r1_gap = w_min - m_plus;
    rep.r3_gap = -(w_max + m_minus);
    rep.r1_holds = rep.r1_gap > 0.0;
    rep.r3_holds = rep.r3_gap > 0.0;
    return rep;
}

} // namespace checksolve::oracle

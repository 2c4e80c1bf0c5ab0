#pragma once

#include <cstdint>
#include <vector>

#include "checksolve/forcing.hpp"

namespace checksolve {

/// Two-point Dirichlet problem
///   -u'' = c_plus (u^+)^p - c_minus (u^-)^p + w   on (a, b),  u(a) = u(b) = 0,
/// with p > 1 and c_plus, c_minus > 0. The symmetric case c_plus = c_minus = c
/// is -u'' = c |u|^{p-1} u + w.
struct ProblemSpec {
    double a = 0.0;
    double b = 1.0;
    double p = 3.0;
    double c_plus = 1.0;
    double c_minus = 1.0;
    ForcingSpec forcing;

    void validate() const;

    double length() const { return b - a; }
    double w(double x) const { return forcing.evaluate(x, a, b); }

    /// Nonlinearity f(t) = c_plus (t^+)^p - c_minus (t^-)^p.
    double f(double t) const;
    /// f'(t); zero at t = 0 since p > 1.
    double fprime(double t) const;
    /// Potential F(t) with F' = f, F(0) = 0.
    double potential(double t) const;

    ProblemSpec with_forcing(ForcingSpec f) const {
        ProblemSpec s = *this;
        s.forcing = std::move(f);
        return s;
    }
};

/// Alternating sign of the cell with index z.
int sigma(std::int64_t z);

/// Partition of [a, b] into J cells with alternating signs. The refinement
/// index k fixes the reference cell size 1/k; a partition is identified with
/// the piecewise-affine map sending the i-th reference cell of length 1/k
/// onto [breakpoints[i], breakpoints[i+1]].
struct Partition {
    int k = 1;
    std::vector<double> breakpoints;  // size J+1, strictly increasing
    std::vector<int> signs;           // size J, alternating +-1

    Partition() = default;
    Partition(int k, std::vector<double> breakpoints, int first_sign = +1);

    int cell_count() const { return static_cast<int>(signs.size()); }
    double a() const { return breakpoints.front(); }
    double b() const { return breakpoints.back(); }
    double cell_length(int i) const { return breakpoints[i + 1] - breakpoints[i]; }
    std::vector<double> lengths() const;

    void validate() const;
};

/// Distortion and distance data for piecewise-affine deformations.
struct DeformationMetrics {
    double lipschitz_L = 1.0;
    double sup_distance = 0.0;
    double lip_distance = 0.0;
    double distance_to_reference = 0.0;
};

/// J equal cells covering [a, b], first cell sign +1 unless flipped.
Partition uniform_partition(const ProblemSpec& spec, int k, int J, int first_sign = +1);

/// Checks that max(k(b-a)/J, J/(k(b-a))) <= L_bound; throws
/// InfeasiblePartition naming the violated bound otherwise.
void check_partition_feasible(const ProblemSpec& spec, int k, int J, double L_bound);

/// The distortion of the partition's piecewise-affine representative:
/// max over cells of max(k l_i, 1/(k l_i)). Always >= 1; equals 1 iff
/// every cell has length exactly 1/k.
double lipschitz_constant(const Partition& partition);

/// sup- and Lipschitz-seminorm distance between two piecewise-affine maps
/// over the same reference grid (same k, J). Exact: the sup is attained at
/// breakpoints, the Lipschitz seminorm is the largest slope difference.
DeformationMetrics deformation_distance(const Partition& t, const Partition& t0);

} // namespace checksolve

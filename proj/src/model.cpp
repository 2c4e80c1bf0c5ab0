#include "checksolve/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "checksolve/errors.hpp"

namespace checksolve {

void ProblemSpec::validate() const {
    if (!(b > a)) throw InvalidSpec("ProblemSpec: requires b > a");
    if (!(p > 1.0)) throw InvalidSpec("ProblemSpec: requires p > 1");
    if (!(c_plus > 0.0)) throw InvalidSpec("ProblemSpec: requires c_plus > 0");
    if (!(c_minus > 0.0)) throw InvalidSpec("ProblemSpec: requires c_minus > 0");
}

double ProblemSpec::f(double t) const {
    if (t > 0.0) return c_plus * std::pow(t, p);
    if (t < 0.0) return -c_minus * std::pow(-t, p);
    return 0.0;
}

double ProblemSpec::fprime(double t) const {
    if (t > 0.0) return p * c_plus * std::pow(t, p - 1.0);
    if (t < 0.0) return p * c_minus * std::pow(-t, p - 1.0);
    return 0.0;
}

double ProblemSpec::potential(double t) const {
    if (t > 0.0) return c_plus * std::pow(t, p + 1.0) / (p + 1.0);
    if (t < 0.0) return c_minus * std::pow(-t, p + 1.0) / (p + 1.0);
    return 0.0;
}

int sigma(std::int64_t z) {
    return (z % 2 == 0) ? +1 : -1;
}

Partition::Partition(int k, std::vector<double> bps, int first_sign)
    : k(k), breakpoints(std::move(bps)) {
    const int J = static_cast<int>(breakpoints.size()) - 1;
    signs.resize(J);
    for (int i = 0; i < J; ++i) signs[i] = first_sign * sigma(i);
    validate();
}

std::vector<double> Partition::lengths() const {
    std::vector<double> l(cell_count());
    for (int i = 0; i < cell_count(); ++i) l[i] = cell_length(i);
    return l;
}

void Partition::validate() const {
    if (k < 1) throw InvalidSpec("Partition: k must be >= 1");
    if (breakpoints.size() < 2) throw InvalidSpec("Partition: needs at least one cell");
    if (signs.size() != breakpoints.size() - 1)
        throw InvalidSpec("Partition: signs/breakpoints size mismatch");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i]))
            throw InvalidSpec("Partition: breakpoints must be strictly increasing");
    }
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (signs[i] != 1 && signs[i] != -1)
            throw InvalidSpec("Partition: signs must be +-1");
        if (i > 0 && signs[i] != -signs[i - 1])
            throw InvalidSpec("Partition: signs must alternate");
    }
}

Partition uniform_partition(const ProblemSpec& spec, int k, int J, int first_sign) {
    spec.validate();
    if (J < 1 || k < 1) throw InvalidSpec("uniform_partition: requires J >= 1 and k >= 1");
    std::vector<double> bps(J + 1);
    for (int i = 0; i <= J; ++i)
        bps[i] = spec.a + (spec.b - spec.a) * static_cast<double>(i) / J;
    bps[J] = spec.b;
    return Partition(k, std::move(bps), first_sign);
}

void check_partition_feasible(const ProblemSpec& spec, int k, int J, double L_bound) {
    const double stretch = static_cast<double>(k) * spec.length() / J;
    const double L = std::max(stretch, 1.0 / stretch);
    if (L > L_bound) {
        std::ostringstream oss;
        oss << "infeasible partition: max(k(b-a)/J, J/(k(b-a))) = " << L
            << " exceeds L_bound = " << L_bound << " (k=" << k << ", J=" << J << ")";
        throw InfeasiblePartition(oss.str(), L);
    }
}

double lipschitz_constant(const Partition& partition) {
    double L = 1.0;
    for (int i = 0; i < partition.cell_count(); ++i) {
        const double s = partition.k * partition.cell_length(i);
        L = std::max({L, s, 1.0 / s});
    }
    return L;
}

DeformationMetrics deformation_distance(const Partition& t, const Partition& t0) {
    if (t.k != t0.k || t.cell_count() != t0.cell_count())
        throw InvalidSpec("deformation_distance: mismatched reference grids");
    DeformationMetrics m;
    m.lipschitz_L = lipschitz_constant(t);
    for (std::size_t i = 0; i < t.breakpoints.size(); ++i)
        m.sup_distance = std::max(m.sup_distance,
                                  std::abs(t.breakpoints[i] - t0.breakpoints[i]));
    for (int i = 0; i < t.cell_count(); ++i) {
        const double ds = t.k * (t.cell_length(i) - t0.cell_length(i));
        m.lip_distance = std::max(m.lip_distance, std::abs(ds));
    }
    m.distance_to_reference = m.sup_distance + m.lip_distance;
    return m;
}

} // namespace checksolve

#include "checksolve/tridiag.hpp"

#include <cmath>
#include <limits>

namespace checksolve {

void SymTridiag::mul(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += off[i - 1] * x[i - 1];
        if (i + 1 < n) v += off[i] * x[i + 1];
        y[i] = v;
    }
}

std::vector<double> SymTridiag::mul(std::span<const double> x) const {
    std::vector<double> y(x.size());
    mul(x, y);
    return y;
}

TridiagLDLT::TridiagLDLT(const SymTridiag& a) {
    const std::size_t n = a.size();
    d_.resize(n);
    l_.resize(n > 0 ? n - 1 : 0);
    min_pivot_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double di = a.diag[i];
        if (i > 0) di -= l_[i - 1] * l_[i - 1] * d_[i - 1];
        d_[i] = di;
        if (di < min_pivot_) min_pivot_ = di;
        if (!(di > 0.0)) {
            pd_ = false;
            // keep factoring defensively is pointless; bail
            for (std::size_t j = i; j + 1 < n; ++j) l_[j] = 0.0;
            for (std::size_t j = i + 1; j < n; ++j) d_[j] = 1.0;
            break;
        }
        if (i + 1 < n) l_[i] = a.off[i] / di;
    }
}

std::vector<double> TridiagLDLT::solve(std::span<const double> b) const {
    const std::size_t n = d_.size();
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 1; i < n; ++i) x[i] -= l_[i - 1] * x[i - 1];
    for (std::size_t i = 0; i < n; ++i) x[i] /= d_[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= l_[i] * x[i + 1];
    return x;
}

bool solve_tridiag_pivoting(std::vector<double> diag, std::vector<double> lower,
                            std::vector<double> upper, std::vector<double> rhs,
                            std::vector<double>& x) {
    const std::size_t n = diag.size();
    if (n == 0) { x.clear(); return true; }
    // second superdiagonal appears under row swaps
    std::vector<double> upper2(n >= 2 ? n - 2 : 0, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double piv = diag[i], sub = lower[i];
        if (std::abs(sub) > std::abs(piv)) {
            std::swap(diag[i], lower[i]);
            std::swap(upper[i], diag[i + 1]);
            if (i + 2 < n) std::swap(upper2[i], upper[i + 1]);
            std::swap(rhs[i], rhs[i + 1]);
            piv = diag[i];
        }
        if (piv == 0.0) return false;
        const double m = lower[i] / piv;
        diag[i + 1] -= m * upper[i];
        if (i + 2 < n) upper[i + 1] -= m * upper2[i];
        rhs[i + 1] -= m * rhs[i];
    }
    if (diag[n - 1] == 0.0) return false;
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double v = rhs[ii];
        if (ii + 1 < n) v -= upper[ii] * x[ii + 1];
        if (ii + 2 < n) v -= upper2[ii] * x[ii + 2];
        x[ii] = v / diag[ii];
    }
    return true;
}

} // namespace checksolve

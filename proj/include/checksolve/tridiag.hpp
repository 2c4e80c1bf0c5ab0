#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace checksolve {

/// Symmetric tridiagonal matrix, stored as main diagonal and one
/// off-diagonal. Used for P1 stiffness matrices and Hessians.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;  // size diag.size()-1

    std::size_t size() const { return diag.size(); }

    void mul(std::span<const double> x, std::span<double> y) const;
    std::vector<double> mul(std::span<const double> x) const;
};

/// LDL^T factorization of a symmetric tridiagonal matrix. Factorization
/// succeeds with positive pivots iff the matrix is positive definite.
class TridiagLDLT {
public:
    /// Factors A; pd() reports whether all pivots stayed positive.
    explicit TridiagLDLT(const SymTridiag& a);

    bool pd() const { return pd_; }
    double min_pivot() const { return min_pivot_; }

    /// Solves A x = b. Only valid when pd().
    std::vector<double> solve(std::span<const double> b) const;

private:
    std::vector<double> d_, l_;
    bool pd_ = true;
    double min_pivot_ = 0.0;
};

/// Solves a general (possibly indefinite) tridiagonal system by Gaussian
/// elimination with partial pivoting. Returns false if singular.
bool solve_tridiag_pivoting(std::vector<double> diag, std::vector<double> lower,
                            std::vector<double> upper, std::vector<double> rhs,
                            std::vector<double>& x);

} // namespace checksolve

#pragma once

#include <string>
#include <vector>

namespace checksolve {

enum class ForcingKind {
    Constant,            ///< params: {c}
    Polynomial,          ///< params: {c0, c1, ...}, sum c_i x^i
    Sinusoid,            ///< params: {A, n, phase}: A sin(n pi (x-a)/(b-a) + phase)
    SignOfEigenfunction  ///< params: {k_eig, A}: A sign(sin(k_eig pi (x-a)/(b-a)))
};

struct ForcingTerm {
    ForcingKind kind = ForcingKind::Constant;
    std::vector<double> params;

    double evaluate(double x, double a, double b) const;
};

/// Bounded piecewise-smooth forcing term, a sum of elementary terms.
/// Evaluation is deterministic and pointwise.
struct ForcingSpec {
    std::vector<ForcingTerm> terms;

    bool zero() const { return terms.empty(); }
    double evaluate(double x, double a, double b) const;

    static ForcingSpec none() { return {}; }
    static ForcingSpec constant(double c);
    static ForcingSpec sinusoid(double amplitude, double n, double phase = 0.0);
    static ForcingSpec sign_of_eigenfunction(int k_eig, double amplitude);
};

std::string to_string(ForcingKind kind);
ForcingKind forcing_kind_from_string(const std::string& s);

} // namespace checksolve

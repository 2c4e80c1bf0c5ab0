#include "checksolve/forcing.hpp"

#include <cmath>

#include "checksolve/errors.hpp"

namespace checksolve {

namespace {
constexpr double kPi = 3.14159265358979323846;

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }
} // namespace

double ForcingTerm::evaluate(double x, double a, double b) const {
    switch (kind) {
        case ForcingKind::Constant:
            return params.empty() ? 0.0 : params[0];
        case ForcingKind::Polynomial: {
            double v = 0.0;
            for (std::size_t i = params.size(); i-- > 0;) v = v * x + params[i];
            return v;
        }
        case ForcingKind::Sinusoid: {
            const double amp = params.size() > 0 ? params[0] : 0.0;
            const double n = params.size() > 1 ? params[1] : 1.0;
            const double phase = params.size() > 2 ? params[2] : 0.0;
            return amp * std::sin(n * kPi * (x - a) / (b - a) + phase);
        }
        case ForcingKind::SignOfEigenfunction: {
            const double k = params.size() > 0 ? params[0] : 1.0;
            const double amp = params.size() > 1 ? params[1] : 0.0;
            return amp * sgn(std::sin(k * kPi * (x - a) / (b - a)));
        }
    }
    return 0.0;
}

double ForcingSpec::evaluate(double x, double a, double b) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.evaluate(x, a, b);
    return v;
}

ForcingSpec ForcingSpec::constant(double c) {
    return {{ForcingTerm{ForcingKind::Constant, {c}}}};
}

ForcingSpec ForcingSpec::sinusoid(double amplitude, double n, double phase) {
    return {{ForcingTerm{ForcingKind::Sinusoid, {amplitude, n, phase}}}};
}

ForcingSpec ForcingSpec::sign_of_eigenfunction(int k_eig, double amplitude) {
    return {{ForcingTerm{ForcingKind::SignOfEigenfunction,
                         {static_cast<double>(k_eig), amplitude}}}};
}

std::string to_string(ForcingKind kind) {
    switch (kind) {
        case ForcingKind::Constant: return "constant";
        case ForcingKind::Polynomial: return "polynomial";
        case ForcingKind::Sinusoid: return "sinusoid";
        case ForcingKind::SignOfEigenfunction: return "sign-of-eigenfunction";
    }
    return "constant";
}

ForcingKind forcing_kind_from_string(const std::string& s) {
    if (s == "constant") return ForcingKind::Constant;
    if (s == "polynomial") return ForcingKind::Polynomial;
    if (s == "sinusoid") return ForcingKind::Sinusoid;
    if (s == "sign-of-eigenfunction") return ForcingKind::SignOfEigenfunction;
    throw ConfigError("unknown forcing kind: " + s);
}

} // namespace checksolve

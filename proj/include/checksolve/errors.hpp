#pragma once

#include <stdexcept>
#include <string>

namespace checksolve {

/// Base class for all solver errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested (k, J, L) combination cannot satisfy the distortion bound.
class InfeasiblePartition : public Error {
public:
    InfeasiblePartition(const std::string& msg, double violated_bound)
        : Error(msg), violated_bound(violated_bound) {}
    double violated_bound;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

/// Cell length below the resolvable scale.
class DegenerateCell : public Error {
public:
    using Error::Error;
};

/// Signals that a cell is too large for the local solve to be trusted;
/// the caller should refine the partition index k.
class CellTooLarge : public Error {
public:
    CellTooLarge(const std::string& msg, int cell_index = -1)
        : Error(msg), cell_index(cell_index) {}
    int cell_index;
};

class HessianNotPD : public CellTooLarge {
public:
    explicit HessianNotPD(const std::string& msg) : CellTooLarge(msg) {}
};

class MassConstraintViolated : public CellTooLarge {
public:
    MassConstraintViolated(const std::string& msg, double mass)
        : CellTooLarge(msg), mass(mass) {}
    double mass;
};

/// The energy along a ray keeps increasing on the whole search range.
class NoInteriorMax : public Error {
public:
    using Error::Error;
};

class MaxIterations : public Error {
public:
    MaxIterations(const std::string& msg, double residual = 0.0)
        : Error(msg), residual(residual) {}
    double residual;
};

class MaxOuterIterations : public Error {
public:
    using Error::Error;
};

/// The distortion cap L is active at outer convergence.
class StalledOnBoundary : public Error {
public:
    StalledOnBoundary(const std::string& msg, double lipschitz)
        : Error(msg), lipschitz(lipschitz) {}
    double lipschitz;
};

/// A required zero is missing from its localization window.
class ViolatedLocalization : public Error {
public:
    ViolatedLocalization(const std::string& msg, int index)
        : Error(msg), index(index) {}
    int index;
};

/// Trajectory blow-up during ODE integration.
class Overflow : public Error {
public:
    Overflow(const std::string& msg, double x_blow)
        : Error(msg), x_blow(x_blow) {}
    double x_blow;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace checksolve

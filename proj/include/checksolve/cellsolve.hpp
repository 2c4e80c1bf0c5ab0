#pragma once

#include <span>
#include <utility>
#include <vector>

#include "checksolve/model.hpp"
#include "checksolve/tridiag.hpp"

namespace checksolve {

/// Uniform grid on one cell with homogeneous Dirichlet endpoints.
/// Only the m interior nodes carry unknowns.
struct CellGrid {
    double x_left = 0.0;
    double x_right = 1.0;
    int m = 0;
    double h = 0.0;

    double node(int j) const { return x_left + h * (j + 1); }  // j = 0..m-1
    std::vector<double> nodes() const;
};

/// P1 finite-element energy on a cell, with trapezoid (mass-lumped)
/// quadrature for the nonlinear and forcing terms:
///   E(u) = 1/2 <K u, u> - sum_j w_j Pot(u_j) - sum_j w_j load_j u_j.
class DiscreteEnergy {
public:
    DiscreteEnergy(const ProblemSpec& spec, CellGrid grid);

    const CellGrid& grid() const { return grid_; }
    const SymTridiag& stiffness() const { return stiffness_; }
    const std::vector<double>& load() const { return load_; }
    double weight() const { return grid_.h; }
    double p() const { return p_; }

    double energy(std::span<const double> u) const;
    void gradient(std::span<const double> u, std::span<double> g) const;
    std::vector<double> gradient(std::span<const double> u) const;
    SymTridiag hessian(std::span<const double> u) const;

    /// sum_j w_j |u_j|^{p+1}
    double lp1_mass(std::span<const double> u) const;
    /// Scalar nonlinearity and potential of the underlying problem.
    double f(double t) const { return spec_.f(t); }
    double fprime(double t) const { return spec_.fprime(t); }
    double potential(double t) const { return spec_.potential(t); }

    /// x = K^{-1} r (Riesz lift to the discrete H^1_0 metric).
    std::vector<double> stiffness_solve(std::span<const double> r) const;
    /// sqrt(r^T K^{-1} r), the discrete dual norm.
    double dual_norm(std::span<const double> r) const;
    /// Dual norm of the full right-hand side w f(u) + load; reference scale
    /// for relative residuals.
    double rhs_dual_norm(std::span<const double> u) const;

    /// First Dirichlet eigenvector of the cell, sign +-1, unit max.
    std::vector<double> first_eigenvector(int sign) const;

private:
    ProblemSpec spec_;  // interval fields unused here; nonlinearity + w only
    CellGrid grid_;
    SymTridiag stiffness_;
    std::vector<double> load_;  // w sampled at interior nodes
    double p_;
    TridiagLDLT k_factor_;  // K is PD by construction
};

struct CellSolution {
    CellGrid grid;
    int sign = +1;
    std::vector<double> u_tilde;
    std::vector<double> u;
    double energy_tilde = 0.0;
    double energy = 0.0;
    double flux_left = 0.0;
    double flux_right = 0.0;
    double nehari_residual = 0.0;
    double grad_norm = 0.0;       // dual norm of grad E at u, relative
    double lp1_mass_tilde = 0.0;
};

struct SolverOptions {
    double tol_newton = 1e-10;  // relative, on the dual gradient norm
    double tol_nehari = 1e-8;
    double tol_grad = 1e-8;     // relative, on the dual gradient norm
    int max_iterations = 10000;
    double armijo_factor = 0.5;
    double armijo_slope = 1e-4;
};

/// Builds the grid and discrete energy for one cell. m >= 3 interior nodes.
std::pair<CellGrid, DiscreteEnergy> discretize_cell(const ProblemSpec& spec,
                                                    double x_left, double x_right,
                                                    int m);

/// Local minimizer near zero by damped Newton from u = 0. The Hessian must
/// stay positive definite along the path and the final lp1 mass must stay
/// below 1; violations throw HessianNotPD / MassConstraintViolated, the
/// signal that the cell is too large at this forcing.
std::vector<double> solve_tilde(const DiscreteEnergy& energy,
                                const SolverOptions& opts = {});

/// Maximizes phi(t) = E(u_tilde + t d) over t > 0. Returns (t_star, value)
/// with phi'(t_star) = 0 and phi''(t_star) < 0.
std::pair<double, double> ray_maximize(const DiscreteEnergy& energy,
                                       std::span<const double> u_tilde,
                                       std::span<const double> d);

/// Number of ray maximizations that saw a larger energy beyond the first
/// bracket (diagnostic; such cases are logged, never chosen silently).
long ray_multibracket_count();

/// Cone-constrained Nehari minimizer above (sign = +1) or below (sign = -1)
/// the local minimizer: projected gradient in the stiffness metric with cone
/// projection and ray reprojection, then a Newton polish on the critical
/// point equation.
CellSolution solve_cell_nehari(const DiscreteEnergy& energy,
                               std::vector<double> u_tilde, int sign,
                               const SolverOptions& opts = {});

/// Infimum of E over the discrete sphere sum_j w_j |u_j|^{p+1} = 1,
/// by normalized projected gradient descent.
double constrained_infimum(const DiscreteEnergy& energy,
                           const SolverOptions& opts = {});

/// One-sided second-order endpoint derivatives from the Dirichlet zero and
/// two interior values; exact for quadratics.
std::pair<double, double> cell_flux(const CellGrid& grid, std::span<const double> u);
std::pair<double, double> cell_flux(const CellSolution& solution);

} // namespace checksolve

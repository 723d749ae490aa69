#pragma once

#include <memory>
#include <optional>

#include "supercrit/grid.hpp"
#include "supercrit/kernels.hpp"
#include "supercrit/reduction.hpp"

namespace supercrit::solver {

/// Symmetric 2d+1-point discretization of -div(a grad .) + c0 on the inside
/// nodes of a grid, with arithmetic face averaging of a, plus the nodal data
/// (Q, p) of the nonlinearity.
struct DiscreteOperator {
    std::shared_ptr<const MaskedGrid> grid;
    int faces = 4;
    std::vector<double> diag;
    std::vector<double> face_w;
    std::vector<std::int32_t> nbr;
    std::vector<double> Q;
    std::vector<double> c0;
    double p = 4.0;
    double cell_volume = 0.0;

    kernels::StencilData stencil() const {
        return {diag.data(), face_w.data(), nbr.data(), faces,
                static_cast<std::int64_t>(diag.size())};
    }
    std::int64_t size() const { return static_cast<std::int64_t>(diag.size()); }
    void apply(const std::vector<double>& x, std::vector<double>& y, kernels::Exec exec) const;
};

DiscreteOperator assemble(const reduction::WeightedEllipticProblem& problem,
                          std::shared_ptr<const MaskedGrid> grid);

struct EnergyGradient {
    double J = 0.0;
    std::vector<double> grad;   // cell-volume-scaled nodal gradient
    double grad_norm = 0.0;     // discrete L2 norm of grad: sqrt(vol * sum grad^2)
    double residual_sup = 0.0;  // cell-volume-scaled sup of Av - Q f(v)
};

/// J(v) = 1/2 ||v||_a^2 - (1/p) |v|_{Q,p}^p by midpoint quadrature;
/// grad = (A v - Q |v|^{p-2} v) * cell volume.
EnergyGradient energy_and_gradient(const DiscreteOperator& op, const std::vector<double>& v,
                                   kernels::Exec exec = kernels::default_exec());

struct SolveOptions {
    double h = 1.0 / 64;
    double tol_factor = 1e-8;  // gradient tolerance = tol_factor * cell volume
    int max_outer = 4000;
    int path_segments = 64;
    std::uint64_t seed = 0;
    kernels::Exec exec = kernels::default_exec();
    bool verbose = false;  // per-iteration trace on stderr
};

struct SolveReport {
    Field field;
    double energy = 0.0;
    double gradient_norm = 0.0;
    double residual_sup = 0.0;
    int iterations = 0;
    bool converged = false;
    double p = 0.0;
};

/// Least-energy positive solution by mountain-pass path deformation: a path
/// from 0 past the energy well, maximum located on it, descent in the
/// a-weighted H1 metric with Armijo line search, curvature-corrected steps
/// near the critical point. Non-convergence yields converged = false, never a
/// silent wrong answer.
SolveReport mountain_pass_solve(const reduction::WeightedEllipticProblem& problem,
                                std::shared_ptr<const MaskedGrid> grid,
                                const SolveOptions& options);
SolveReport mountain_pass_solve(const reduction::WeightedEllipticProblem& problem,
                                const SolveOptions& options);

/// Same search restricted to the subspace of fields odd under the reflection
/// of the given axis about the domain box center. Domain, weight and
/// coefficient must be invariant under that reflection.
SolveReport sign_changing_solve(const reduction::WeightedEllipticProblem& problem, int reflect_axis,
                                const SolveOptions& options);

/// Connected components of {v > 0} and {v < 0} (edge connectivity).
int nodal_domain_count(const Field& field, double rel_threshold = 1e-9);

struct ShootResult {
    double center_value = 0.0;
    double boundary_miss = 0.0;
    std::vector<std::pair<double, double>> profile;  // (r, v)
};

/// Radial oracle on the unit ball: -v'' - (d-1)/r v' = v^{p-1}, v'(0) = 0,
/// v(1) = 0, v > 0 on [0,1), by bisection on the center value with RK4
/// integration. Refuses p at or above the critical exponent of the ball.
ShootResult shoot_radial(int d, double p, double tol);

/// One RK4 integration from a given center value; returns the first zero
/// radius (or +inf if none before r_max) for the scaling-law tests.
double radial_first_zero(int d, double p, double center_value, double r_max);

/// Warm-started sweep of mountain-pass solves along a strictly increasing
/// exponent list.
std::vector<SolveReport> continuation_in_p(const reduction::WeightedEllipticProblem& problem,
                                           const std::vector<double>& p_list,
                                           const SolveOptions& options);

}  // namespace supercrit::solver

#pragma once

#include <memory>
#include <string>

#include "supercrit/algebra.hpp"
#include "supercrit/common.hpp"
#include "supercrit/geometry.hpp"
#include "supercrit/grid.hpp"

namespace supercrit::reduction {

/// Reduced problem -div(a grad v) + c0 v = Q |v|^{p-2} v on `domain`,
/// v = 0 on the boundary.
struct WeightedEllipticProblem {
    int d = 2;
    geometry::ProfileDomain domain;
    geometry::Scalar weight_a;   // a > 0
    geometry::Scalar coeff_Q;    // Q > 0
    geometry::Scalar linear_c0;  // diagonal potential, 0 when absent
    double p = 4.0;
    std::string description;
};

/// Rotationally symmetric data: m blocks of multiplicities k_i, a profile
/// Theta in R^{N-k} whose first m coordinates are the block radii, and a
/// block-radial coefficient K given in the ambient (y^1,...,y^m,z) coordinates.
struct RotationalSpec {
    std::vector<int> multiplicities;  // k_i >= 0
    int ambient_dim = 0;              // N
    geometry::ProfileDomain profile;
    geometry::Scalar K;       // strictly positive on the closed domain
    geometry::Gradient gradK; // optional; required by certificates

    int block_count() const { return static_cast<int>(multiplicities.size()); }
    int total_multiplicity() const;
    int reduced_dim() const { return ambient_dim - total_multiplicity(); }

    /// Profile coordinates -> ambient coordinates, y^i = x_i * e_1.
    Point embed(const Point& x) const;

    void validate(bool certificate_context) const;
};

/// Group-orbit data entering the compactness threshold: the minimum over the
/// closed domain of #Gx / K(x)^{(M-2)/2}, the Sobolev constant, and the
/// dimension M.
struct OrbitData {
    double min_orbit_weight = kInf;  // +inf when every orbit is infinite
    double sobolev_constant = 1.0;   // documented default for dimensionless runs
    int dimension = 3;               // M
};

/// 2(N-k)/(N-k-2); +inf sentinel when N-k <= 2.
double critical_exponent(int N, int k);

/// -Delta v + (a/(c* |x|)) v = (1/(c* |x|)) |v|^{p-2} v on U, where c* comes
/// from the dilation model. U must not contain the origin.
WeightedEllipticProblem hopf_reduce(const geometry::ProfileDomain& U, double a, double p,
                                    const algebra::DilationModel& model);

/// -div(a grad v) = Q |v|^{p-2} v on Theta with a = x_1^{k_1}...x_m^{k_m} and
/// Q = a K.
WeightedEllipticProblem symmetry_reduce(const RotationalSpec& spec, double p);

/// Energy level below which the Palais-Smale condition holds:
/// min_orbit_weight * S^{M/2} / M.
double ps_threshold(const OrbitData& orbit);

struct LevelBound {
    double c_upper;    // sum of the subdomain mountain-pass energies
    double ell_upper;  // c_upper / (S^{M/2} / M)
};

/// Empirical upper bounds for the minimax levels from disjoint-subdomain
/// energies; the exact infima are not computable here.
LevelBound level_bound(const std::vector<double>& energies, const OrbitData& orbit);

/// u = v o pi. Values are interpolated from the reduced field (C^2 spline,
/// zero extension on the boundary); queries whose image falls outside the
/// closure of U raise a domain error.
class LiftedField {
public:
    LiftedField(const solver::Field& v, const algebra::DilationModel& model);

    /// Lifted value at z in R^{2 kdim}.
    double operator()(const Point& z) const;
    /// The reduced interpolant at w in R^{kdim+1} (no closure check).
    double reduced_value(const Point& w) const;

    const solver::FieldEvaluator& evaluator() const { return eval_; }
    const algebra::DilationModel& model() const { return model_; }
    int algebra_dim() const { return kdim_; }

private:
    bool near_closure(const Point& w) const;

    std::shared_ptr<const solver::MaskedGrid> grid_;
    solver::FieldEvaluator eval_;
    algebra::DilationModel model_;
    int kdim_;
};

LiftedField lift(const solver::Field& v, const algebra::DilationModel& model);

}  // namespace supercrit::reduction

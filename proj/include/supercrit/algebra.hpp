#pragma once

#include <array>
#include <functional>

#include "supercrit/common.hpp"

namespace supercrit::algebra {

/// Element of a normed division algebra (reals, complex, quaternions or
/// octonions) over the standard basis e0..e{dim-1}. Products are formed by
/// Cayley-Dickson doubling with the convention
///     (a,b)(c,d) = (ac - conj(d)b, da + b conj(c)),
/// which keeps the Euclidean norm multiplicative through dim 8. The basis
/// tables that result from this convention are listed in docs/algebra.md.
struct AlgebraElement {
    int dim = 1;               // 1, 2, 4 or 8
    std::array<double, 8> c{}; // coefficients; entries at index >= dim stay zero

    static AlgebraElement zero(int dim);
    static AlgebraElement unit(int dim, int axis); // basis vector e_axis
    static bool valid_dim(int dim) { return dim == 1 || dim == 2 || dim == 4 || dim == 8; }

    double norm_sq() const;
    double norm() const;
};

AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement conjugate(const AlgebraElement& a);
AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement scale(double s, const AlgebraElement& a);

/// Point of R^N = K x K, N = 2 dim.
struct HopfPoint {
    AlgebraElement z1, z2;

    HopfPoint() = default;
    HopfPoint(AlgebraElement a, AlgebraElement b);

    int algebra_dim() const { return z1.dim; }
    double norm_sq() const { return z1.norm_sq() + z2.norm_sq(); }

    /// Coordinates as a flat point of R^{2 dim}.
    Point coords() const;
    static HopfPoint from_coords(int dim, const Point& x);
};

/// pi(z1, z2) = (2 conj(z1) z2, |z1|^2 - |z2|^2) in R^{dim+1}.
Point hopf_map(const HopfPoint& p);

/// Conformal factor model lambda^2(x) = c_star * |pi(x)|. The constant is not
/// hard-coded: calibrate() recovers it from the Laplacian-intertwining
/// identity Lap(v o pi) = lambda^2 (Lap v) o pi with v = |w|^2 on the complex
/// Hopf map, and snaps to the nearest integer. See docs/algebra.md for why
/// this yields 4 rather than the factor 2 quoted in parts of the literature.
struct DilationModel {
    double c_star = 4.0;

    static DilationModel calibrated(double h = 1e-3);
};

/// lambda^2 at p: c_star * (|z1|^2 + |z2|^2) = c_star * |pi(p)|.
double dilation_sq(const HopfPoint& p, const DilationModel& model);

using ScalarField = std::function<double(const Point&)>;

/// Central-difference Laplacian of v at x with step h.
double fd_laplacian(const ScalarField& v, const Point& x, double h);

/// | Lap_h (v o pi)(p) - dilation_sq(p) * Lap_h(v)(pi(p)) |.
/// O(h^2) for polynomial v when the model carries the true constant.
double morphism_residual(const ScalarField& v, const HopfPoint& p, double h,
                         const DilationModel& model);

}  // namespace supercrit::algebra

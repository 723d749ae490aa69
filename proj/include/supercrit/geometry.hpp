#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "supercrit/common.hpp"

namespace supercrit::geometry {

struct BoundarySample {
    Point point;
    Point normal;   // outward unit normal
    double weight;  // surface-measure quadrature weight
};

/// Low-dimensional generator domain with a sampled boundary. The first
/// coordinate plays the role of the rotation radius t; the remaining
/// coordinates form the z-block.
struct ProfileDomain {
    int dimension = 2;
    std::function<bool(const Point&)> inside;
    std::vector<BoundarySample> boundary;
    Point box_lo, box_hi;

    // Generator identity, kept so predicates can be re-validated at higher
    // sampling density before a certificate is emitted.
    std::string kind = "custom";
    nlohmann::ordered_json parameters;

    // Slack for strict-inequality predicates: 1e-9 for analytic normals,
    // 1e-4 for polygonal approximations.
    double geo_tol = 1e-9;

    double boundary_measure() const;
};

/// Generators for the standard fixtures. `density_scale` multiplies the
/// default linear sampling density (256 samples per unit length in 2-D,
/// 32 per unit length per direction on surfaces).
ProfileDomain make_ball(const Point& center, double radius, double density_scale = 1.0,
                        std::uint64_t seed = 42);
ProfileDomain make_annulus_sector(int dimension, double r0, double r1, double half_angle,
                                  double density_scale = 1.0);
ProfileDomain make_dumbbell(int dimension, double t_left, double t_right, double radius,
                            double neck_half_width, double density_scale = 1.0);
ProfileDomain make_polygon(const std::vector<Point>& vertices, double density_scale = 1.0);

/// JSON-driven front used by the CLI and by 4x-density re-validation.
ProfileDomain make_profile(const std::string& kind, const nlohmann::ordered_json& parameters,
                           double density_scale = 1.0);

/// phi(t) = (1 - (tau/t)^{k+1}) / (k+1); solves phi'(t) t + (k+1) phi(t) = 1
/// with phi(tau) = 0, and is strictly increasing on (0, inf).
double phi(double t, double tau, int k);
double phi_prime(double t, double tau, int k);

struct ChiParams {
    std::vector<double> taus;       // tau_i > 0
    std::vector<int> multiplicities;  // k_i >= 0, block i lives in R^{k_i+1}
    int ambient_dim = 0;            // N

    int block_count() const { return static_cast<int>(taus.size()); }
    int total_multiplicity() const;  // k = sum k_i
    void validate() const;
};

struct ChiEval {
    Point vector;       // chi(x)
    double divergence;  // N - k, exact
    double quad_bound;  // max{1 - k_i phi_i(|y^i|), 1}
};

/// chi(y^1,...,y^m,z) = (phi_1(|y^1|) y^1, ..., phi_m(|y^m|) y^m, z).
ChiEval chi_eval(const Point& x, const ChiParams& params);

struct StarshapeVerdict {
    struct Witness {
        Point point;
        double value;
        std::string check;
    };
    bool pass = false;
    std::vector<Witness> witnesses;
    double t0 = 0.0, t1 = 0.0;
};

/// Definition-style predicate: every boundary sample x away from the poles
/// xi_0 = (t0,0), xi_1 = (t1,0) satisfies <x - xi_i, nu(x)> > geo_tol, and all
/// first coordinates stay within [t0, t1] up to the same slack.
StarshapeVerdict doubly_starshaped_check(const ProfileDomain& profile, double t0, double t1);

/// <(phi(t) t, z), nu(t,z)> > geo_tol at boundary samples away from the poles;
/// single-block configurations only, with tau_1 playing the role of t0.
StarshapeVerdict boundary_flux_check(const ProfileDomain& profile, const ChiParams& params);

/// Flux positivity for the constructed product-of-spheres domains: checks
/// <(phi_1(x_1)x_1,...,phi_m(x_m)x_m, z), nu> > geo_tol on the profile
/// boundary. The first m profile coordinates are the block radii.
StarshapeVerdict product_flux_check(const ProfileDomain& profile, const ChiParams& params);

/// Solves max_i {1 - k_i phi_i(tau_i - rho)} = alpha for rho in (0, min tau_i)
/// by bisection, to an equation residual of 1e-10 or better.
double solve_rho(double alpha, const ChiParams& params);

using Scalar = std::function<double(const Point&)>;
using Gradient = std::function<Point(const Point&)>;

/// <y, grad_y K> <= tol and <z, grad_z K> <= tol at every sample; the first
/// `y_dim` coordinates of each sample form the y-block. gradK is spot-checked
/// against finite differences of K and rejected beyond 1% mismatch.
StarshapeVerdict k_monotonicity_check(const Scalar& K, const Gradient& gradK,
                                      const std::vector<Point>& samples, int y_dim,
                                      double tol = 1e-9);

/// Uniform sampler of interior points (rejection inside the bounding box).
std::vector<Point> sample_interior(const ProfileDomain& profile, int count, Rng& rng);

}  // namespace supercrit::geometry

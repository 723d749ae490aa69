#pragma once

#include <json.hpp>

#include "supercrit/geometry.hpp"
#include "supercrit/reduction.hpp"
#include "supercrit/solver.hpp"

namespace supercrit::certify {

/// Quadrature values of the four terms of the variational boundary identity
///   1/2 boundary flux = divergence term + gradK term + dchi term.
struct PohozaevTerms {
    double boundary_term = 0.0;  // 1/2 \oint |grad u|^2 <chi, nu> dsigma
    double div_term = 0.0;       // \int div(chi) [K|u|^p/p - |grad u|^2/2]
    double gradK_term = 0.0;     // (1/p) \int |u|^p <chi, grad K>
    double dchi_term = 0.0;      // \int <dchi[grad u], grad u>

    double residual() const {
        return std::abs(boundary_term - (div_term + gradK_term + dchi_term));
    }
};

struct ChiSpec {
    enum class Kind { Identity, Radial } kind = Kind::Identity;
    geometry::ChiParams params;  // used by Kind::Radial, in domain coordinates
};

/// Evaluates the identity's terms for a converged low-dimensional solve with
/// unit weight. Boundary gradients are recovered by one-sided second-order
/// differences along the inward normal.
PohozaevTerms pohozaev_terms(const solver::SolveReport& report,
                             const reduction::WeightedEllipticProblem& problem,
                             const ChiSpec& chi, const geometry::Scalar& K,
                             const geometry::Gradient& gradK);

/// (N-k) (1/p - 1/2 + alpha/(N-k)) * gradIntegral: positive forces
/// p < 2(N-k)/(N-k-2 alpha), zero at the threshold, negative above.
double final_inequality(double grad_integral, int N, int k, double p, double alpha);

/// Exact-rational version of the scalar factor, for threshold-case checks.
struct Rational {
    long long num = 0, den = 1;

    Rational() = default;
    Rational(long long n, long long d);
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    bool is_zero() const { return num == 0; }
    double to_double() const { return static_cast<double>(num) / den; }
};

Rational final_inequality_factor(int N, int k, const Rational& p, const Rational& alpha);

enum class Verdict { Nonexistence, ExistenceSubcritical, Inconclusive };

std::string to_string(Verdict v);

struct Certificate {
    Verdict verdict = Verdict::Inconclusive;
    std::string theorem;
    std::string scope;  // which solution class the verdict covers
    double threshold_exponent = 0.0;
    double p = 0.0;
    nlohmann::ordered_json checks;
    nlohmann::ordered_json parameters;

    nlohmann::ordered_json to_json() const;
};

/// Pure verdict logic: NONEXISTENCE only when every hypothesis check passed
/// and p >= nonexistence_from; EXISTENCE_SUBCRITICAL only when every check
/// passed and 2 < p < existence_below.
Verdict assemble_verdict(bool checks_pass, double p, double existence_below,
                         double nonexistence_from);

/// Nonexistence/existence certificate for a single-block rotational domain:
/// double starshapedness of the profile, boundary flux of the radial field,
/// and coefficient monotonicity, against the (k+1)-st critical exponent.
Certificate certify_theorem1(const reduction::RotationalSpec& spec, double p, double t0,
                             double t1);

struct ProductCertificate {
    Certificate certificate;
    geometry::ProfileDomain theta;  // constructed ball profile
    double rho = 0.0;
    double alpha = 0.0;
};

/// Product-of-spheres construction: picks the largest admissible exponent
/// shift alpha, solves for the ball radius rho, and certifies nonexistence
/// for p >= threshold + epsilon.
ProductCertificate certify_theorem4(const std::vector<int>& multiplicities,
                                    const std::vector<double>& taus, double epsilon, double p,
                                    int ambient_dim);

/// Certificate for Hopf-lifted domains, scoped to the unit-sphere-invariant
/// solution class. The reduced coefficient 1/(c*|x|) is verified against the
/// monotonicity hypotheses.
Certificate certify_hopf(const geometry::ProfileDomain& theta_n, int n, double p,
                         const algebra::DilationModel& model);

}  // namespace supercrit::certify

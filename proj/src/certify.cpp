#include "supercrit/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace supercrit::certify {

using geometry::ProfileDomain;
using geometry::StarshapeVerdict;
using solver::MaskedGrid;

namespace {

// Nodal gradient: central differences where both neighbors are inside, else
// second-order one-sided differences into the domain (Dirichlet zeros are not
// touched, which keeps the estimate second order up to the mask stair-step).
std::vector<double> nodal_gradient(const solver::Field& f) {
    const MaskedGrid& g = *f.grid;
    const std::int64_t n = g.inside_count();
    std::vector<double> grad(n * g.dim, 0.0);
    const double inv2h = 1.0 / (2.0 * g.h);
    for (std::int64_t i = 0; i < n; ++i) {
        const auto c = g.lattice_coords(g.nodes[i]);
        for (int axis = 0; axis < g.dim; ++axis) {
            auto cp = c, cm = c;
            cp[axis]++;
            cm[axis]--;
            const std::int32_t ip = g.compact[g.lattice_index(cp[0], cp[1], cp[2])];
            const std::int32_t im = g.compact[g.lattice_index(cm[0], cm[1], cm[2])];
            const double vi = f.values[i];
            double d;
            if (ip >= 0 && im >= 0) {
                d = (f.values[ip] - f.values[im]) * inv2h;
            } else if (ip >= 0) {
                auto cpp = cp;
                cpp[axis]++;
                const std::int32_t ipp = g.compact[g.lattice_index(cpp[0], cpp[1], cpp[2])];
                d = ipp >= 0 ? -(3.0 * vi - 4.0 * f.values[ip] + f.values[ipp]) * inv2h
                             : (f.values[ip] - 0.0) * inv2h;
            } else if (im >= 0) {
                auto cmm = cm;
                cmm[axis]--;
                const std::int32_t imm = g.compact[g.lattice_index(cmm[0], cmm[1], cmm[2])];
                d = imm >= 0 ? (3.0 * vi - 4.0 * f.values[im] + f.values[imm]) * inv2h
                             : (0.0 - f.values[im]) * inv2h;
            } else {
                d = 0.0;
            }
            grad[i * g.dim + axis] = d;
        }
    }
    return grad;
}

struct ChiAt {
    Point vec;
    double divergence;
};

ChiAt chi_at(const Point& x, const ChiSpec& chi) {
    if (chi.kind == ChiSpec::Kind::Identity)
        return {x, static_cast<double>(x.size())};
    const geometry::ChiEval ev = geometry::chi_eval(x, chi.params);
    return {ev.vector, ev.divergence};
}

// <dchi(x)[g], g>: identity gives |g|^2; the radial field gives
// phi |g_y|^2 + phi' <y,g_y>^2/|y| per block plus the z part.
double dchi_quadratic(const Point& x, const Point& g, const ChiSpec& chi) {
    if (chi.kind == ChiSpec::Kind::Identity) return dot(g, g);
    const auto& prm = chi.params;
    double s = 0.0;
    int off = 0;
    for (int b = 0; b < prm.block_count(); ++b) {
        const int bd = prm.multiplicities[b] + 1;
        double r2 = 0.0, yg = 0.0, gg = 0.0;
        for (int q = 0; q < bd; ++q) {
            r2 += x[off + q] * x[off + q];
            yg += x[off + q] * g[off + q];
            gg += g[off + q] * g[off + q];
        }
        const double r = std::sqrt(r2);
        s += geometry::phi(r, prm.taus[b], prm.multiplicities[b]) * gg +
             geometry::phi_prime(r, prm.taus[b], prm.multiplicities[b]) * yg * yg / r;
        off += bd;
    }
    for (std::size_t q = off; q < x.size(); ++q) s += g[q] * g[q];
    return s;
}

// Cubic least-squares fit A + Bs + Cs^2 + Ds^3 through inward probes of the
// field; returns the slope at the fitted zero crossing. Reading the slope at
// the fit's own zero absorbs the O(h) offset of the mask's effective
// boundary, which a plain one-sided difference at depth h cannot see past.
double boundary_slope(const std::vector<std::pair<double, double>>& probes) {
    double M[4][5] = {};
    for (const auto& [s, v] : probes) {
        const double b[4] = {1.0, s, s * s, s * s * s};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) M[i][j] += b[i] * b[j];
            M[i][4] += b[i] * v;
        }
    }
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
        std::swap(M[c], M[piv]);
        for (int r = 0; r < 4; ++r) {
            if (r == c || M[c][c] == 0.0) continue;
            const double f = M[r][c] / M[c][c];
            for (int cc = c; cc < 5; ++cc) M[r][cc] -= f * M[c][cc];
        }
    }
    const double A = M[0][4] / M[0][0], B = M[1][4] / M[1][1];
    const double C = M[2][4] / M[2][2], D = M[3][4] / M[3][3];
    double s0 = B != 0.0 ? -A / B : 0.0;
    const double denom = B + C * s0 + D * s0 * s0;
    if (denom != 0.0) s0 = -A / denom;
    return B + 2.0 * C * s0 + 3.0 * D * s0 * s0;
}

nlohmann::ordered_json check_to_json(const StarshapeVerdict& v, std::size_t samples,
                                     double tolerance) {
    nlohmann::ordered_json j;
    j["pass"] = v.pass;
    j["samples"] = samples;
    j["tolerance"] = tolerance;
    j["witnesses"] = v.witnesses.size();
    if (!v.witnesses.empty()) {
        j["first_witness"] = {{"point", v.witnesses.front().point},
                              {"value", v.witnesses.front().value},
                              {"check", v.witnesses.front().check}};
    }
    return j;
}

// Interior samples of the ambient rotational domain: profile interior points
// with each block radius spread over a seeded random direction.
std::vector<Point> ambient_samples(const ProfileDomain& profile,
                                   const std::vector<int>& multiplicities, int ambient_dim,
                                   int count, std::uint64_t seed) {
    Rng rng(seed);
    const auto interior = geometry::sample_interior(profile, count, rng);
    const int m = static_cast<int>(multiplicities.size());
    std::vector<Point> out;
    out.reserve(interior.size());
    for (const auto& x : interior) {
        Point y(ambient_dim, 0.0);
        int off = 0;
        for (int b = 0; b < m; ++b) {
            const int bd = multiplicities[b] + 1;
            const Point dir = rng.unit_vector(bd);
            for (int q = 0; q < bd; ++q) y[off + q] = x[b] * dir[q];
            off += bd;
        }
        for (int q = m; q < profile.dimension; ++q) y[off + q - m] = x[q];
        out.push_back(std::move(y));
    }
    return out;
}

ProfileDomain regenerate(const ProfileDomain& profile, double density_scale) {
    if (profile.kind == "custom")
        throw ConfigError(
            "certificates require a regenerable profile (ball, annulus_sector, dumbbell or "
            "polygon) so predicates can be re-validated at higher density");
    return geometry::make_profile(profile.kind, profile.parameters, density_scale);
}

}  // namespace

PohozaevTerms pohozaev_terms(const solver::SolveReport& report,
                             const reduction::WeightedEllipticProblem& problem,
                             const ChiSpec& chi, const geometry::Scalar& K,
                             const geometry::Gradient& gradK) {
    if (!report.converged)
        throw std::invalid_argument("pohozaev_terms: report must come from a converged solve");
    if (chi.kind == ChiSpec::Kind::Radial && chi.params.ambient_dim != problem.d)
        throw std::invalid_argument("pohozaev_terms: chi parameters must match the domain dimension");

    const solver::Field& f = report.field;
    const MaskedGrid& g = *f.grid;
    const double w = g.cell_volume();
    const double p = report.p;

    PohozaevTerms terms;

    // Boundary term from the profile's samples; u = 0 there, so
    // |grad u| = |du/dnu|, recovered by a one-sided fit along the inward
    // normal with probing depths clear of the mask's boundary layer.
    const solver::FieldEvaluator eval(f);
    double diam = 0.0;
    for (int q = 0; q < g.dim; ++q)
        diam = std::max(diam, (g.extents[q] - 1) * g.h);
    const double s1 = std::max(1.5 * g.h, 0.0075 * diam);
    for (const auto& b : problem.domain.boundary) {
        std::vector<std::pair<double, double>> probes;
        probes.reserve(5);
        for (int j = 1; j <= 5; ++j) {
            Point x = b.point;
            for (int q = 0; q < g.dim; ++q) x[q] -= j * s1 * b.normal[q];
            probes.push_back({j * s1, eval.value(x)});
        }
        const double dn = boundary_slope(probes);
        const ChiAt cx = chi_at(b.point, chi);
        terms.boundary_term += 0.5 * dn * dn * dot(cx.vec, b.normal) * b.weight;
    }

    // Volume terms by midpoint quadrature over the inside nodes.
    const std::vector<double> grad = nodal_gradient(f);
    for (std::int64_t i = 0; i < g.inside_count(); ++i) {
        const Point x = g.point_at(g.nodes[i]);
        const double u = f.values[i];
        Point gi(g.dim);
        for (int q = 0; q < g.dim; ++q) gi[q] = grad[i * g.dim + q];
        const double grad_sq = dot(gi, gi);
        const double up = std::pow(std::abs(u), p);
        const ChiAt cx = chi_at(x, chi);
        terms.div_term += w * cx.divergence * (K(x) * up / p - 0.5 * grad_sq);
        terms.gradK_term += w * up / p * dot(cx.vec, gradK(x));
        terms.dchi_term += w * dchi_quadratic(x, gi, chi);
    }
    return terms;
}

double final_inequality(double grad_integral, int N, int k, double p, double alpha) {
    if (!(grad_integral > 0.0))
        throw std::invalid_argument("final_inequality: gradient integral must be positive");
    if (N - k < 3) throw std::invalid_argument("final_inequality: requires N - k >= 3");
    const double nk = N - k;
    return nk * (1.0 / p - 0.5 + alpha / nk) * grad_integral;
}

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}
Rational Rational::operator-(const Rational& o) const {
    return Rational(num * o.den - o.num * den, den * o.den);
}
Rational Rational::operator*(const Rational& o) const {
    return Rational(num * o.num, den * o.den);
}

Rational final_inequality_factor(int N, int k, const Rational& p, const Rational& alpha) {
    const Rational nk(N - k, 1);
    const Rational inv_p(p.den, p.num);
    const Rational half(1, 2);
    return nk * (inv_p - half + alpha * Rational(1, N - k));
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Nonexistence: return "NONEXISTENCE";
        case Verdict::ExistenceSubcritical: return "EXISTENCE_SUBCRITICAL";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

nlohmann::ordered_json Certificate::to_json() const {
    nlohmann::ordered_json j;
    j["verdict"] = to_string(verdict);
    j["theorem"] = theorem;
    j["scope"] = scope;
    j["threshold_exponent"] = threshold_exponent;
    j["p"] = p;
    j["checks"] = checks;
    j["parameters"] = parameters;
    return j;
}

Verdict assemble_verdict(bool checks_pass, double p, double existence_below,
                         double nonexistence_from) {
    if (!checks_pass) return Verdict::Inconclusive;
    if (p >= nonexistence_from) return Verdict::Nonexistence;
    if (p > 2.0 && p < existence_below) return Verdict::ExistenceSubcritical;
    return Verdict::Inconclusive;
}

Certificate certify_theorem1(const reduction::RotationalSpec& spec, double p, double t0,
                             double t1) {
    spec.validate(true);
    if (spec.block_count() != 1)
        throw std::invalid_argument("certify_theorem1: single rotation block expected");
    if (!spec.gradK)
        throw std::invalid_argument("certify_theorem1: coefficient gradient is required");

    const int N = spec.ambient_dim;
    const int k = spec.total_multiplicity();
    const double threshold = reduction::critical_exponent(N, k);

    geometry::ChiParams chi{{t0}, {k}, N};
    const ProfileDomain dense = regenerate(spec.profile, 4.0);

    const StarshapeVerdict star = geometry::doubly_starshaped_check(spec.profile, t0, t1);
    const StarshapeVerdict star4 = geometry::doubly_starshaped_check(dense, t0, t1);
    const StarshapeVerdict flux = geometry::boundary_flux_check(spec.profile, chi);
    const StarshapeVerdict flux4 = geometry::boundary_flux_check(dense, chi);

    constexpr std::uint64_t kSampleSeed = 7;
    const auto samples =
        ambient_samples(spec.profile, spec.multiplicities, N, 64, kSampleSeed);
    const StarshapeVerdict kmono =
        geometry::k_monotonicity_check(spec.K, spec.gradK, samples, k + 1);

    const bool all_pass = star.pass && star4.pass && flux.pass && flux4.pass && kmono.pass;

    Certificate cert;
    cert.verdict = assemble_verdict(all_pass, p, threshold, threshold);
    cert.theorem = "rotational-starshaped-nonexistence";
    cert.scope = "all solutions";
    cert.threshold_exponent = threshold;
    cert.p = p;
    cert.checks["starshape"] = check_to_json(star, spec.profile.boundary.size(), spec.profile.geo_tol);
    cert.checks["starshape_dense"] = check_to_json(star4, dense.boundary.size(), dense.geo_tol);
    cert.checks["flux"] = check_to_json(flux, spec.profile.boundary.size(), spec.profile.geo_tol);
    cert.checks["flux_dense"] = check_to_json(flux4, dense.boundary.size(), dense.geo_tol);
    cert.checks["K_monotonicity"] = check_to_json(kmono, samples.size(), 1e-9);
    cert.parameters = {{"ambient_dim", N},
                       {"multiplicities", spec.multiplicities},
                       {"t0", t0},
                       {"t1", t1},
                       {"profile_kind", spec.profile.kind},
                       {"profile_parameters", spec.profile.parameters},
                       {"sample_seed", kSampleSeed}};
    return cert;
}

ProductCertificate certify_theorem4(const std::vector<int>& multiplicities,
                                    const std::vector<double>& taus, double epsilon, double p,
                                    int ambient_dim) {
    if (multiplicities.empty() || multiplicities.size() != taus.size())
        throw std::invalid_argument("certify_theorem4: multiplicities and taus must pair up");
    for (int ki : multiplicities)
        if (ki < 1) throw std::invalid_argument("certify_theorem4: multiplicities must be >= 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("certify_theorem4: epsilon must be positive");
    const int k = std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
    if (k > ambient_dim - 3)
        throw HypothesisError("certify_theorem4: requires k <= N - 3");

    const int N = ambient_dim;
    const double threshold = reduction::critical_exponent(N, k);
    const double target = threshold + epsilon;
    const double nk = N - k;

    constexpr double kDelta = 1e-9;
    const double alpha = std::min(0.5 * nk - kDelta, 0.5 * nk * (1.0 - 2.0 / target));
    if (!(alpha > 1.0))
        throw HypothesisError("certify_theorem4: no admissible alpha for this epsilon");

    geometry::ChiParams chi{taus, multiplicities, N};
    const double rho = geometry::solve_rho(alpha, chi);

    double eq = -kInf;
    for (std::size_t i = 0; i < taus.size(); ++i)
        eq = std::max(eq, 1.0 - multiplicities[i] *
                               geometry::phi(taus[i] - rho, taus[i], multiplicities[i]));
    const double rho_residual = std::abs(eq - alpha);

    Point center(N - k, 0.0);
    for (std::size_t i = 0; i < taus.size(); ++i) center[i] = taus[i];
    ProfileDomain theta = geometry::make_ball(center, rho);
    const ProfileDomain dense = regenerate(theta, 4.0);

    const StarshapeVerdict flux = geometry::product_flux_check(theta, chi);
    const StarshapeVerdict flux4 = geometry::product_flux_check(dense, chi);
    const bool all_pass = flux.pass && flux4.pass && rho_residual <= 1e-10;

    ProductCertificate out;
    out.theta = std::move(theta);
    out.rho = rho;
    out.alpha = alpha;
    out.certificate.verdict = assemble_verdict(all_pass, p, threshold, target);
    out.certificate.theorem = "product-of-spheres-construction";
    out.certificate.scope = "all solutions";
    out.certificate.threshold_exponent = target;
    out.certificate.p = p;
    out.certificate.checks["rho_equation"] = {{"pass", rho_residual <= 1e-10},
                                              {"residual", rho_residual},
                                              {"rho", rho},
                                              {"alpha", alpha}};
    out.certificate.checks["flux"] =
        check_to_json(flux, out.theta.boundary.size(), out.theta.geo_tol);
    out.certificate.checks["flux_dense"] = check_to_json(flux4, dense.boundary.size(), dense.geo_tol);
    out.certificate.parameters = {{"ambient_dim", N},
                                  {"multiplicities", multiplicities},
                                  {"taus", taus},
                                  {"epsilon", epsilon},
                                  {"existence_below", threshold}};
    return out;
}

Certificate certify_hopf(const geometry::ProfileDomain& theta_n, int n, double p,
                         const algebra::DilationModel& model) {
    const int dim_k = theta_n.dimension + n - 1;
    if (dim_k != 2 && dim_k != 4 && dim_k != 8)
        throw std::invalid_argument(
            "certify_hopf: profile dimension and n must combine to a division algebra");
    if (n < 0 || n > dim_k - 2)
        throw std::invalid_argument("certify_hopf: n out of range [0, dim K - 2]");

    const int N = 2 * dim_k;
    const int k = dim_k - 1 + n;
    const double threshold = reduction::critical_exponent(N, k);

    const ProfileDomain dense = regenerate(theta_n, 4.0);
    double t0 = kInf, t1 = -kInf;
    for (const auto* prof : {&theta_n, &dense})
        for (const auto& b : prof->boundary) {
            t0 = std::min(t0, b.point[0]);
            t1 = std::max(t1, b.point[0]);
        }
    if (!(t0 > 0.0))
        throw std::domain_error("certify_hopf: profile must stay in the open half-space t > 0");

    const StarshapeVerdict star = geometry::doubly_starshaped_check(theta_n, t0, t1);
    const StarshapeVerdict star4 = geometry::doubly_starshaped_check(dense, t0, t1);

    geometry::ChiParams chi{{t0}, {n}, theta_n.dimension + n};
    const StarshapeVerdict flux = geometry::boundary_flux_check(theta_n, chi);
    const StarshapeVerdict flux4 = geometry::boundary_flux_check(dense, chi);

    // Reduced coefficient K(x) = 1/(c* |x|) against the monotonicity hypotheses.
    const double c = model.c_star;
    const geometry::Scalar K = [c](const Point& x) { return 1.0 / (c * norm(x)); };
    const geometry::Gradient gradK = [c](const Point& x) {
        const double r = norm(x);
        Point g(x.size());
        for (std::size_t q = 0; q < x.size(); ++q) g[q] = -x[q] / (c * r * r * r);
        return g;
    };
    constexpr std::uint64_t kSampleSeed = 7;
    const auto samples = ambient_samples(theta_n, {n}, theta_n.dimension + n, 64, kSampleSeed);
    const StarshapeVerdict kmono = geometry::k_monotonicity_check(K, gradK, samples, n + 1);

    const bool all_pass =
        star.pass && star4.pass && flux.pass && flux4.pass && kmono.pass;

    Certificate cert;
    cert.verdict = assemble_verdict(all_pass, p, threshold, threshold);
    cert.theorem = "hopf-lifted-nonexistence";
    cert.scope = "unit-sphere-invariant solutions";
    cert.threshold_exponent = threshold;
    cert.p = p;
    cert.checks["starshape"] = check_to_json(star, theta_n.boundary.size(), theta_n.geo_tol);
    cert.checks["starshape_dense"] = check_to_json(star4, dense.boundary.size(), dense.geo_tol);
    cert.checks["flux"] = check_to_json(flux, theta_n.boundary.size(), theta_n.geo_tol);
    cert.checks["flux_dense"] = check_to_json(flux4, dense.boundary.size(), dense.geo_tol);
    cert.checks["K_monotonicity"] = check_to_json(kmono, samples.size(), 1e-9);
    cert.parameters = {{"algebra_dim", dim_k},
                       {"ambient_dim", N},
                       {"n", n},
                       {"k", k},
                       {"c_star", model.c_star},
                       {"t0", t0},
                       {"t1", t1},
                       {"profile_kind", theta_n.kind},
                       {"profile_parameters", theta_n.parameters},
                       {"sample_seed", kSampleSeed}};
    return cert;
}

}  // namespace supercrit::certify

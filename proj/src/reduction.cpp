#include "supercrit/reduction.hpp"

#include <cmath>

namespace supercrit::reduction {

int RotationalSpec::total_multiplicity() const {
    int k = 0;
    for (int ki : multiplicities) k += ki;
    return k;
}

Point RotationalSpec::embed(const Point& x) const {
    Point y(ambient_dim, 0.0);
    int off = 0;
    const int m = block_count();
    for (int i = 0; i < m; ++i) {
        y[off] = x[i];
        off += multiplicities[i] + 1;
    }
    for (int q = m; q < static_cast<int>(x.size()); ++q) y[off + q - m] = x[q];
    return y;
}

void RotationalSpec::validate(bool certificate_context) const {
    if (multiplicities.empty()) throw std::invalid_argument("rotational spec: no blocks");
    for (int k : multiplicities)
        if (k < 0) throw std::invalid_argument("rotational spec: multiplicities must be >= 0");
    const int k = total_multiplicity();
    if (ambient_dim < 3) throw std::invalid_argument("rotational spec: ambient dimension >= 3");
    if (profile.dimension != reduced_dim())
        throw std::invalid_argument("rotational spec: profile dimension must be N - k");
    if (certificate_context && k > ambient_dim - 3)
        throw HypothesisError("rotational spec: certificates require k <= N - 3");
    const int m = block_count();
    for (const auto& b : profile.boundary)
        for (int i = 0; i < m; ++i)
            if (b.point[i] <= 0.0)
                throw std::domain_error("rotational spec: profile touches a rotation axis");
}

double critical_exponent(int N, int k) {
    if (N < 3) throw std::invalid_argument("critical_exponent: N must be >= 3");
    if (k < 0 || k > N) throw std::invalid_argument("critical_exponent: k must lie in [0, N]");
    const int denom = N - k - 2;
    if (denom <= 0) return kInf;
    return 2.0 * (N - k) / denom;
}

WeightedEllipticProblem hopf_reduce(const geometry::ProfileDomain& U, double a, double p,
                                    const algebra::DilationModel& model) {
    if (p <= 2.0) throw std::invalid_argument("hopf_reduce: exponent must exceed 2");
    if (U.inside(Point(U.dimension, 0.0)))
        throw std::domain_error("hopf_reduce: domain must not contain the origin");

    const double c = model.c_star;
    WeightedEllipticProblem prob;
    prob.d = U.dimension;
    prob.domain = U;
    prob.weight_a = [](const Point&) { return 1.0; };
    prob.coeff_Q = [c](const Point& x) { return 1.0 / (c * norm(x)); };
    prob.linear_c0 = [a, c](const Point& x) { return a / (c * norm(x)); };
    prob.p = p;
    prob.description = "hopf-reduced (c*=" + std::to_string(c) + ", a=" + std::to_string(a) + ")";
    return prob;
}

WeightedEllipticProblem symmetry_reduce(const RotationalSpec& spec, double p) {
    if (p <= 2.0) throw std::invalid_argument("symmetry_reduce: exponent must exceed 2");
    spec.validate(false);

    const auto mult = spec.multiplicities;
    const int m = spec.block_count();
    auto weight = [mult, m](const Point& x) {
        double a = 1.0;
        for (int i = 0; i < m; ++i) a *= std::pow(x[i], mult[i]);
        return a;
    };
    auto Kfull = spec.K;
    auto embed = [spec](const Point& x) { return spec.embed(x); };

    WeightedEllipticProblem prob;
    prob.d = spec.profile.dimension;
    prob.domain = spec.profile;
    prob.weight_a = weight;
    prob.coeff_Q = [weight, Kfull, embed](const Point& x) { return weight(x) * Kfull(embed(x)); };
    prob.linear_c0 = [](const Point&) { return 0.0; };
    prob.p = p;
    prob.description = "symmetry-reduced divergence form";
    return prob;
}

double ps_threshold(const OrbitData& orbit) {
    if (!(orbit.min_orbit_weight > 0.0))
        throw std::invalid_argument("ps_threshold: orbit weight must be positive");
    if (!(orbit.sobolev_constant > 0.0))
        throw std::invalid_argument("ps_threshold: Sobolev constant must be positive");
    if (is_inf(orbit.min_orbit_weight)) return kInf;
    return orbit.min_orbit_weight * std::pow(orbit.sobolev_constant, 0.5 * orbit.dimension) /
           orbit.dimension;
}

LevelBound level_bound(const std::vector<double>& energies, const OrbitData& orbit) {
    if (energies.empty()) throw std::invalid_argument("level_bound: no subdomain energies");
    double c = 0.0;
    for (double e : energies) {
        if (!(e > 0.0)) throw std::invalid_argument("level_bound: energies must be positive");
        c += e;
    }
    const double unit = std::pow(orbit.sobolev_constant, 0.5 * orbit.dimension) / orbit.dimension;
    return {c, c / unit};
}

LiftedField::LiftedField(const solver::Field& v, const algebra::DilationModel& model)
    : grid_(v.grid), eval_(v), model_(model), kdim_(v.grid->dim - 1) {
    if (kdim_ != 1 && kdim_ != 2)
        throw std::invalid_argument("lift: reduced field must live in R^2 or R^3");
}

bool LiftedField::near_closure(const Point& w) const {
    if (!eval_.in_box(w)) return false;
    const auto& g = *grid_;
    std::array<int, 3> c{};
    for (int q = 0; q < g.dim; ++q) {
        c[q] = static_cast<int>(std::lround((w[q] - g.origin[q]) / g.h));
        c[q] = std::clamp(c[q], 0, g.extents[q] - 1);
    }
    // accept anything within two cells of an inside node
    for (int dk = (g.dim == 3 ? -2 : 0); dk <= (g.dim == 3 ? 2 : 0); ++dk)
        for (int dj = -2; dj <= 2; ++dj)
            for (int di = -2; di <= 2; ++di) {
                const int i = c[0] + di, j = c[1] + dj, k = c[2] + dk;
                if (i < 0 || j < 0 || k < 0 || i >= g.extents[0] || j >= g.extents[1] ||
                    k >= g.extents[2])
                    continue;
                if (g.mask[g.lattice_index(i, j, k)]) return true;
            }
    return false;
}

double LiftedField::operator()(const Point& z) const {
    if (static_cast<int>(z.size()) != 2 * kdim_)
        throw std::invalid_argument("lift: query point must live in R^{2 dim}");
    const Point w = algebra::hopf_map(algebra::HopfPoint::from_coords(kdim_, z));
    if (!near_closure(w))
        throw std::domain_error("lift: image point falls outside the closure of the base domain");
    return eval_.value(w);
}

double LiftedField::reduced_value(const Point& w) const { return eval_.value(w); }

LiftedField lift(const solver::Field& v, const algebra::DilationModel& model) {
    return LiftedField(v, model);
}

}  // namespace supercrit::reduction

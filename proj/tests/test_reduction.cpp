#include <doctest.h>

#include "support.hpp"
#include "supercrit/reduction.hpp"

using namespace supercrit;
using namespace supercrit::reduction;

TEST_SUITE("reduction") {

TEST_CASE("critical exponent values and sentinel") {
    CHECK(critical_exponent(6, 0) == doctest::Approx(3.0));
    CHECK(critical_exponent(5, 1) == doctest::Approx(4.0));
    CHECK(is_inf(critical_exponent(5, 3)));
    CHECK(is_inf(critical_exponent(4, 2)));
    CHECK_THROWS_AS(critical_exponent(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(critical_exponent(5, -1), std::invalid_argument);
    CHECK_THROWS_AS(critical_exponent(5, 6), std::invalid_argument);
}

TEST_CASE("critical exponent monotonicity in N and k") {
    for (int k = 0; k <= 3; ++k)
        for (int N = k + 4; N <= 16; ++N) {
            const double a = critical_exponent(N, k);
            const double b = critical_exponent(N + 1, k);
            if (!is_inf(a) && !is_inf(b)) CHECK(b < a);
        }
    for (int N = 5; N <= 16; ++N)
        for (int k = 0; k + 3 <= N && k + 1 + 2 < N; ++k) {
            const double a = critical_exponent(N, k);
            const double b = critical_exponent(N, k + 1);
            if (!is_inf(a) && !is_inf(b)) CHECK(b > a);
        }
}

TEST_CASE("hopf reduction carries the calibrated constant into the coefficients") {
    const auto shell = geometry::make_annulus_sector(3, 0.8, 1.8, std::numbers::pi);
    const algebra::DilationModel model = algebra::DilationModel::calibrated();

    const WeightedEllipticProblem plain = hopf_reduce(shell, 0.0, 4.0, model);
    const Point x = {1.0, 0.0, 0.0};
    CHECK(plain.weight_a(x) == doctest::Approx(1.0));
    CHECK(plain.coeff_Q(x) == doctest::Approx(1.0 / model.c_star));
    CHECK(plain.linear_c0(x) == doctest::Approx(0.0));

    const WeightedEllipticProblem with_a = hopf_reduce(shell, 1.0, 4.0, model);
    CHECK(with_a.linear_c0(x) == doctest::Approx(1.0 / model.c_star));
    CHECK(with_a.linear_c0({0.0, 2.0, 0.0}) == doctest::Approx(1.0 / (2.0 * model.c_star)));

    // the quoted-in-the-literature constant stays available through the model
    const WeightedEllipticProblem quoted = hopf_reduce(shell, 0.0, 4.0, algebra::DilationModel{2.0});
    CHECK(quoted.coeff_Q(x) == doctest::Approx(0.5));

    const auto ball = geometry::make_ball({0.0, 0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(hopf_reduce(ball, 0.0, 4.0, model), std::domain_error);
}

TEST_CASE("symmetry reduction builds the divergence-form weights") {
    auto spec_for = [](std::vector<int> ks, int N) {
        RotationalSpec s;
        s.multiplicities = std::move(ks);
        s.ambient_dim = N;
        const int d = s.reduced_dim();
        Point center(d, 0.0);
        center[0] = 2.0;
        for (int i = 1; i < s.block_count(); ++i) center[i] = 2.0;
        s.profile = geometry::make_ball(center, 0.5);
        s.K = [](const Point&) { return 1.0; };
        return s;
    };

    // one block, k = 3: a(x) = x1^3 = Q(x)
    const auto p1 = symmetry_reduce(spec_for({3}, 5), 4.0);
    CHECK(p1.weight_a({1.5, 0.0}) == doctest::Approx(std::pow(1.5, 3)));
    CHECK(p1.coeff_Q({1.5, 0.0}) == doctest::Approx(std::pow(1.5, 3)));

    // two blocks (2,3): a = x1^2 x2^3
    const auto p2 = symmetry_reduce(spec_for({2, 3}, 8), 4.0);
    CHECK(p2.weight_a({1.5, 2.5, 0.3}) == doctest::Approx(1.5 * 1.5 * std::pow(2.5, 3)));

    // all multiplicities zero: plain problem
    const auto p0 = symmetry_reduce(spec_for({0}, 3), 4.0);
    CHECK(p0.weight_a({1.7, 0.2}) == doctest::Approx(1.0));

    // weights positive at every boundary sample
    for (const auto& b : p2.domain.boundary) {
        CHECK(p2.weight_a(b.point) > 0.0);
        CHECK(p2.coeff_Q(b.point) > 0.0);
    }

    // a profile crossing the rotation axis is rejected
    RotationalSpec bad = spec_for({1}, 4);
    bad.profile = geometry::make_ball({0.4, 0.0, 0.0}, 0.5);
    CHECK_THROWS_AS(symmetry_reduce(bad, 4.0), std::domain_error);
}

TEST_CASE("palais-smale threshold and its scaling law") {
    CHECK(ps_threshold({1.0, 1.0, 4}) == doctest::Approx(0.25));
    CHECK(ps_threshold({2.0, 3.0, 2}) == doctest::Approx(3.0));
    CHECK(is_inf(ps_threshold({kInf, 1.0, 4})));

    Rng rng(8);
    for (int rep = 0; rep < 50; ++rep) {
        OrbitData o;
        o.min_orbit_weight = rng.uniform(0.1, 5.0);
        o.sobolev_constant = rng.uniform(0.1, 5.0);
        o.dimension = rng.uniform_int(3, 8);
        OrbitData doubled = o;
        doubled.sobolev_constant *= 2.0;
        CHECK(ps_threshold(doubled) ==
              doctest::Approx(ps_threshold(o) * std::pow(2.0, 0.5 * o.dimension)));
    }
    CHECK_THROWS_AS(ps_threshold({-1.0, 1.0, 4}), std::invalid_argument);
}

TEST_CASE("level bounds: sums, normalization, monotonicity") {
    const OrbitData orbit{kInf, 1.0, 4};
    const LevelBound one = level_bound({0.7}, orbit);
    CHECK(one.c_upper == doctest::Approx(0.7));
    CHECK(one.ell_upper == doctest::Approx(0.7 * 4.0));  // S^{M/2}/M = 1/4

    const LevelBound two = level_bound({0.7, 0.4}, orbit);
    CHECK(two.c_upper == doctest::Approx(1.1));

    // adding a subdomain raises the bound by at least the smallest energy
    const std::vector<double> energies = {0.7, 0.4, 0.9};
    double prev = 0.0;
    for (std::size_t k = 1; k <= energies.size(); ++k) {
        const std::vector<double> head(energies.begin(), energies.begin() + k);
        const double c = level_bound(head, orbit).c_upper;
        if (k > 1) CHECK(c >= prev + 0.4 - 1e-15);
        prev = c;
    }

    CHECK_THROWS_AS(level_bound({}, orbit), std::invalid_argument);
    CHECK_THROWS_AS(level_bound({-0.1}, orbit), std::invalid_argument);
}

TEST_CASE("lift composes values with the hopf map") {
    const auto shell = geometry::make_annulus_sector(3, 0.8, 1.8, std::numbers::pi);
    auto grid = std::make_shared<solver::MaskedGrid>(solver::build_grid(shell, 1.0 / 16));
    const algebra::DilationModel model = algebra::DilationModel::calibrated();

    // constant field: lifted values reproduce the constant in the interior
    solver::Field c_field = solver::Field::zeros(grid);
    for (auto& v : c_field.values) v = 2.5;
    const LiftedField u_const(c_field, model);
    // last-coordinate field: u(z) = |z1|^2 - |z2|^2
    solver::Field t_field = solver::Field::zeros(grid);
    for (std::int64_t i = 0; i < grid->inside_count(); ++i)
        t_field.values[i] = grid->point_at(grid->nodes[i])[2];
    const LiftedField u_last(t_field, model);

    // exact composition at grid nodes, reached through a Hopf preimage
    auto preimage = [](const Point& w) {
        const double rho = norm(w);
        const double a = std::sqrt(0.5 * (rho + w[2]));
        return Point{a, 0.0, w[0] / (2.0 * a), w[1] / (2.0 * a)};
    };
    int node_checks = 0;
    for (std::int64_t i = 0; i < grid->inside_count() && node_checks < 50; i += 37) {
        const Point w = grid->point_at(grid->nodes[i]);
        const double rho = norm(w);
        if (rho < 1.15 || rho > 1.45 || rho + w[2] < 0.5) continue;
        const Point z = preimage(w);
        REQUIRE(norm(sub(algebra::hopf_map(algebra::HopfPoint::from_coords(2, z)), w)) < 1e-12);
        CHECK(u_const(z) == doctest::Approx(c_field.values[i]).epsilon(1e-10));
        CHECK(u_last(z) == doctest::Approx(t_field.values[i]).epsilon(1e-9));
        ++node_checks;
    }
    REQUIRE(node_checks > 10);

    Rng rng(9);
    int tested = 0;
    while (tested < 100) {
        // z in R^4 with |z|^2 = |pi(z)| in the middle of the shell
        const Point dir = rng.unit_vector(4);
        const double r = std::sqrt(rng.uniform(1.15, 1.45));
        Point z(4);
        for (int q = 0; q < 4; ++q) z[q] = r * dir[q];
        const Point w = algebra::hopf_map(algebra::HopfPoint::from_coords(2, z));
        ++tested;
        // off-node queries feel the zero extension outside the mask
        CHECK(u_const(z) == doctest::Approx(2.5).epsilon(2e-3));
        CHECK(u_last(z) == doctest::Approx(w[2]).epsilon(5e-3));
    }

    // image outside the closure of the base domain
    CHECK_THROWS_AS(u_const({1.7, 0.0, 0.0, 0.0}), std::domain_error);  // |pi| = 2.89
    CHECK_THROWS_AS(u_const({0.5, 0.0, 0.5, 0.0}), std::domain_error);  // |pi| = 0.5 hole
}

TEST_CASE("lift transfers residuals with the dilation factor") {
    // analytic non-solution field on the 3-D shell, sampled to the grid
    const auto shell = geometry::make_annulus_sector(3, 0.8, 1.8, std::numbers::pi);
    auto grid = std::make_shared<solver::MaskedGrid>(solver::build_grid(shell, 1.0 / 24));
    const algebra::DilationModel model = algebra::DilationModel::calibrated();
    const double a_const = 0.5, p = 4.0;
    const WeightedEllipticProblem prob = hopf_reduce(shell, a_const, p, model);

    auto analytic = [](const Point& w) {
        const double r2 = norm_sq(w);
        return (r2 - 0.64) * (3.24 - r2);
    };
    solver::Field f = solver::Field::zeros(grid);
    for (std::int64_t i = 0; i < grid->inside_count(); ++i)
        f.values[i] = analytic(grid->point_at(grid->nodes[i]));
    const LiftedField u(f, model);
    const solver::FieldEvaluator& ev = u.evaluator();

    auto reduced_residual = [&](const Point& w) {
        const double v = ev.value(w);
        return -ev.laplacian(w) + prob.linear_c0(w) * v -
               prob.coeff_Q(w) * std::pow(std::abs(v), p - 2.0) * v;
    };
    const double h4 = 1.0 / 48;
    auto lifted_residual = [&](const Point& z) {
        const double uz = u(z);
        double lap = 0.0;
        for (int q = 0; q < 4; ++q) {
            Point zp = z, zm = z;
            zp[q] += h4;
            zm[q] -= h4;
            lap += (u(zp) - 2.0 * uz + u(zm)) / (h4 * h4);
        }
        return -lap + a_const * uz - std::pow(std::abs(uz), p - 2.0) * uz;
    };

    Rng rng(10);
    int accepted = 0;
    std::vector<double> ratios;
    while (accepted < 100) {
        const Point dir = rng.unit_vector(4);
        const double r = std::sqrt(rng.uniform(1.15, 1.45));
        Point z(4);
        for (int q = 0; q < 4; ++q) z[q] = r * dir[q];
        const Point w = algebra::hopf_map(algebra::HopfPoint::from_coords(2, z));
        const double rv = reduced_residual(w);
        if (std::abs(rv) < 0.5) continue;  // stay away from the residual's zero set
        ++accepted;
        const double lambda_sq = algebra::dilation_sq(algebra::HopfPoint::from_coords(2, z), model);
        ratios.push_back(lifted_residual(z) / rv / lambda_sq);
    }
    for (double r : ratios) CHECK(r == doctest::Approx(1.0).epsilon(0.05));
}

}  // TEST_SUITE

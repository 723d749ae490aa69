#include <doctest.h>

#include "support.hpp"
#include "supercrit/grid.hpp"
#include "supercrit/kernels.hpp"

using namespace supercrit;
using namespace supercrit::solver;
using kernels::Exec;

TEST_SUITE("grid") {

TEST_CASE("masked grid over the unit disk") {
    const auto disk = geometry::make_ball({0.0, 0.0}, 1.0);
    const MaskedGrid g = build_grid(disk, 1.0 / 32);
    const double area = g.inside_count() * g.cell_volume();
    CHECK(area == doctest::Approx(std::numbers::pi).epsilon(0.05));
    // every inside node has representable neighbors
    for (const auto lat : g.nodes) {
        const auto c = g.lattice_coords(lat);
        for (int q = 0; q < 2; ++q) {
            CHECK(c[q] > 0);
            CHECK(c[q] < g.extents[q] - 1);
        }
    }
}

TEST_CASE("under-resolved domains are rejected") {
    const auto disk = geometry::make_ball({0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(build_grid(disk, 0.4), ConfigError);
    CHECK_THROWS_AS(build_grid(disk, -0.1), ConfigError);
}

TEST_CASE("reflection-symmetric grid pairs nodes exactly") {
    const auto disk = geometry::make_ball({0.0, 0.0}, 1.0);
    const MaskedGrid g = build_grid(disk, 1.0 / 16, 2, 0);
    for (const auto lat : g.nodes) {
        const std::int64_t m = g.mirror_lattice(lat, 0);
        CHECK(g.mask[m] == 1);
        // mirrored coordinates match up to sign
        const Point a = g.point_at(lat);
        const Point b = g.point_at(m);
        CHECK(a[0] == doctest::Approx(-b[0]).epsilon(1e-14));
        CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-14));
    }
}

TEST_CASE("spline evaluator interpolates node values exactly") {
    const auto disk = geometry::make_ball({0.0, 0.0}, 1.0);
    auto g = std::make_shared<MaskedGrid>(build_grid(disk, 1.0 / 16));
    Field f = Field::zeros(g);
    Rng rng(5);
    for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
    const FieldEvaluator eval(f);
    for (std::int64_t i = 0; i < g->inside_count(); i += 7) {
        const Point x = g->point_at(g->nodes[i]);
        CHECK(eval.value(x) == doctest::Approx(f.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("spline evaluator approximates smooth fields and their derivatives") {
    // sample a smooth bump that decays before the lattice edge
    const auto disk = geometry::make_ball({0.0, 0.0}, 1.0);
    auto g = std::make_shared<MaskedGrid>(build_grid(disk, 1.0 / 64));
    auto f = Field::zeros(g);
    auto smooth = [](const Point& x) {
        const double r2 = norm_sq(x);
        return (1.0 - r2) * std::exp(-2.0 * r2);
    };
    for (std::int64_t i = 0; i < g->inside_count(); ++i)
        f.values[i] = smooth(g->point_at(g->nodes[i]));
    const FieldEvaluator eval(f);

    Rng rng(6);
    for (int rep = 0; rep < 200; ++rep) {
        Point x = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        CHECK(eval.value(x) == doctest::Approx(smooth(x)).epsilon(1e-5));
        // analytic gradient of the bump
        const double r2 = norm_sq(x);
        const double dfac = std::exp(-2.0 * r2);
        const Point grad_exact = {x[0] * dfac * (-2.0 - 4.0 * (1.0 - r2)),
                                  x[1] * dfac * (-2.0 - 4.0 * (1.0 - r2))};
        const Point grad = eval.gradient(x);
        for (int q = 0; q < 2; ++q)
            CHECK(std::abs(grad[q] - grad_exact[q]) < 2e-3);
        // laplacian: compare against central differences of the exact field
        double lap_exact = 0.0;
        const double hh = 1e-4;
        for (int q = 0; q < 2; ++q) {
            Point xp = x, xm = x;
            xp[q] += hh;
            xm[q] -= hh;
            lap_exact += (smooth(xp) - 2.0 * smooth(x) + smooth(xm)) / (hh * hh);
        }
        CHECK(std::abs(eval.laplacian(x) - lap_exact) < 5e-2);
    }
}

TEST_CASE("kernels: parallel variants match the serial reference bitwise") {
    Rng rng(7);
    const std::int64_t n = 20011;  // not a multiple of the chunk size
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();

    CHECK(kernels::dot(a.data(), b.data(), n, Exec::Serial) ==
          kernels::dot(a.data(), b.data(), n, Exec::Parallel));
    CHECK(kernels::sup_abs(a.data(), n, Exec::Serial) ==
          kernels::sup_abs(a.data(), n, Exec::Parallel));
    CHECK(kernels::weighted_p_sum(a.data(), b.data(), 4.0, n, Exec::Serial) ==
          kernels::weighted_p_sum(a.data(), b.data(), 4.0, n, Exec::Parallel));

    std::vector<double> y1 = b, y2 = b;
    kernels::axpy(0.37, a.data(), y1.data(), n, Exec::Serial);
    kernels::axpy(0.37, a.data(), y2.data(), n, Exec::Parallel);
    CHECK(y1 == y2);

    std::vector<double> z1(n), z2(n), w(n);
    for (auto& x : w) x = rng.normal();
    kernels::nonlinear_term(a.data(), w.data(), 4.0, z1.data(), n, Exec::Serial);
    kernels::nonlinear_term(a.data(), w.data(), 4.0, z2.data(), n, Exec::Parallel);
    CHECK(z1 == z2);

    // stencil kernel on a synthetic 5-point structure
    const std::int64_t m = 4096;
    std::vector<double> diag(m), fw(m * 4);
    std::vector<std::int32_t> nbr(m * 4);
    for (std::int64_t i = 0; i < m; ++i) {
        diag[i] = 4.0 + rng.uniform(0.0, 1.0);
        for (int f = 0; f < 4; ++f) {
            fw[i * 4 + f] = rng.uniform(0.5, 1.5);
            const std::int64_t cand = i + (f - 2) * 3 + 1;
            nbr[i * 4 + f] = (cand >= 0 && cand < m && cand != i)
                                 ? static_cast<std::int32_t>(cand)
                                 : -1;
        }
    }
    kernels::StencilData s{diag.data(), fw.data(), nbr.data(), 4, m};
    std::vector<double> x(m), out1(m), out2(m);
    for (auto& v : x) v = rng.normal();
    kernels::apply_stencil(s, x.data(), out1.data(), Exec::Serial);
    kernels::apply_stencil(s, x.data(), out2.data(), Exec::Parallel);
    CHECK(out1 == out2);
}

}  // TEST_SUITE

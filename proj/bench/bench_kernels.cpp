// Times the solver's hot kernels in their serial reference and OpenMP
// variants on a disk grid and prints throughput plus the speedup. The two
// variants are required to produce bitwise-identical results; that is
// asserted here on every kernel before timing.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "supercrit/kernels.hpp"
#include "supercrit/reduction.hpp"
#include "supercrit/solver.hpp"

using namespace supercrit;
using namespace supercrit::solver;
using kernels::Exec;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const int m = argc > 1 ? std::atoi(argv[1]) : 1024;
    const int reps = 7;

    reduction::WeightedEllipticProblem prob;
    prob.d = 2;
    prob.domain = geometry::make_ball({0.0, 0.0}, 1.0);
    prob.weight_a = [](const Point& x) { return 1.0 + 0.25 * x[0]; };
    prob.coeff_Q = [](const Point&) { return 1.0; };
    prob.linear_c0 = [](const Point&) { return 0.0; };
    prob.p = 4.0;

    auto grid = std::make_shared<MaskedGrid>(build_grid(prob.domain, 2.0 / m));
    const DiscreteOperator op = assemble(prob, grid);
    const std::int64_t n = op.size();
    std::printf("grid %dx%d, %lld unknowns, %d thread(s)\n", m, m, (long long)n,
                kernels::max_threads());

    Rng rng(1);
    std::vector<double> x(n), y_s(n), y_p(n), w(n);
    for (auto& v : x) v = rng.normal();
    for (auto& v : w) v = rng.uniform(0.5, 1.5);

    struct RowSpec {
        const char* name;
        double bytes_per_elem;
        std::function<void(Exec, std::vector<double>&)> run;
    };
    const std::vector<RowSpec> rows = {
        {"apply_stencil", 8.0 * 7,
         [&](Exec e, std::vector<double>& out) {
             kernels::apply_stencil(op.stencil(), x.data(), out.data(), e);
         }},
        {"dot", 8.0 * 2,
         [&](Exec e, std::vector<double>& out) { out[0] = kernels::dot(x.data(), w.data(), n, e); }},
        {"axpy", 8.0 * 3,
         [&](Exec e, std::vector<double>& out) { kernels::axpy(0.3, x.data(), out.data(), n, e); }},
        {"nonlinear_term", 8.0 * 3,
         [&](Exec e, std::vector<double>& out) {
             kernels::nonlinear_term(x.data(), w.data(), op.p, out.data(), n, e);
         }},
        {"weighted_p_sum", 8.0 * 2,
         [&](Exec e, std::vector<double>& out) {
             out[0] = kernels::weighted_p_sum(x.data(), w.data(), op.p, n, e);
         }},
    };

    std::printf("%-16s %12s %12s %8s\n", "kernel", "serial GB/s", "openmp GB/s", "speedup");
    for (const auto& row : rows) {
        y_s = w;
        y_p = w;
        row.run(Exec::Serial, y_s);
        row.run(Exec::Parallel, y_p);
        if (y_s != y_p) {
            std::fprintf(stderr, "FATAL: %s parallel result differs from the serial reference\n",
                         row.name);
            return 1;
        }
        y_s = w;
        const double ts = time_best_of(reps, [&] { row.run(Exec::Serial, y_s); });
        y_p = w;
        const double tp = time_best_of(reps, [&] { row.run(Exec::Parallel, y_p); });
        const double gb = row.bytes_per_elem * n / 1e9;
        std::printf("%-16s %12.2f %12.2f %7.2fx\n", row.name, gb / ts, gb / tp, ts / tp);
    }
    return 0;
}

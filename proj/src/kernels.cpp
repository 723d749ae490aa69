#include "supercrit/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace supercrit::kernels {

namespace {
// Reduction chunk size. Partial sums are always combined in chunk order, so
// the result is independent of the thread count.
constexpr std::int64_t kChunk = 4096;

// |x|^q with fast paths for the small integer exponents the solvers hit.
inline double pow_abs(double x, double q) {
    const double a = x < 0 ? -x : x;
    if (q == 2.0) return a * a;
    if (q == 1.0) return a;
    if (q == 3.0) return a * a * a;
    if (q == 4.0) return (a * a) * (a * a);
    return std::pow(a, q);
}
}  // namespace

Exec& default_exec() {
    static Exec e = Exec::Parallel;
    return e;
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

void apply_stencil(const StencilData& s, const double* x, double* y, Exec exec) {
    const int faces = s.faces;
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < s.n; ++i) {
            double acc = s.diag[i] * x[i];
            const std::int32_t* nb = s.nbr + i * faces;
            const double* fw = s.face_w + i * faces;
            for (int f = 0; f < faces; ++f)
                if (nb[f] >= 0) acc -= fw[f] * x[nb[f]];
            y[i] = acc;
        }
    } else {
        for (std::int64_t i = 0; i < s.n; ++i) {
            double acc = s.diag[i] * x[i];
            const std::int32_t* nb = s.nbr + i * faces;
            const double* fw = s.face_w + i * faces;
            for (int f = 0; f < faces; ++f)
                if (nb[f] >= 0) acc -= fw[f] * x[nb[f]];
            y[i] = acc;
        }
    }
}

namespace {

template <typename ChunkOp>
double chunked_reduce(std::int64_t n, Exec exec, ChunkOp&& op) {
    const std::int64_t nchunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(static_cast<std::size_t>(std::max<std::int64_t>(nchunks, 1)), 0.0);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t c = 0; c < nchunks; ++c)
            partial[c] = op(c * kChunk, std::min(n, (c + 1) * kChunk));
    } else {
        for (std::int64_t c = 0; c < nchunks; ++c)
            partial[c] = op(c * kChunk, std::min(n, (c + 1) * kChunk));
    }
    double total = 0.0;
    for (std::int64_t c = 0; c < nchunks; ++c) total += partial[c];
    return total;
}

}  // namespace

double dot(const double* a, const double* b, std::int64_t n, Exec exec) {
    return chunked_reduce(n, exec, [&](std::int64_t lo, std::int64_t hi) {
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) s += a[i] * b[i];
        return s;
    });
}

double weighted_p_sum(const double* v, const double* w, double p, std::int64_t n, Exec exec) {
    return chunked_reduce(n, exec, [&](std::int64_t lo, std::int64_t hi) {
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) s += w[i] * pow_abs(v[i], p);
        return s;
    });
}

void axpy(double alpha, const double* x, double* y, std::int64_t n, Exec exec) {
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
    } else {
        for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
    }
}

void xpby(const double* x, double beta, double* y, std::int64_t n, Exec exec) {
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
    } else {
        for (std::int64_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
    }
}

void scale(double alpha, double* x, std::int64_t n, Exec exec) {
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) x[i] *= alpha;
    } else {
        for (std::int64_t i = 0; i < n; ++i) x[i] *= alpha;
    }
}

double sup_abs(const double* x, std::int64_t n, Exec exec) {
    double m = 0.0;
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(max : m)
        for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    } else {
        for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    }
    return m;
}

void nonlinear_term(const double* v, const double* w, double p, double* out, std::int64_t n,
                    Exec exec) {
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            out[i] = w[i] * pow_abs(v[i], p - 2.0) * v[i];
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            out[i] = w[i] * pow_abs(v[i], p - 2.0) * v[i];
    }
}

}  // namespace supercrit::kernels

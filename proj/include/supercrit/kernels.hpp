#pragma once

#include <cstdint>
#include <vector>

namespace supercrit::kernels {

/// Kernel execution policy. Parallel falls back to Serial when the build has
/// no OpenMP. Both variants perform identical floating-point operations in
/// identical order (reductions use fixed-size chunking), so results are
/// bitwise equal; the serial path exists as the reference the tests compare
/// against and as the single-thread fallback.
enum class Exec { Serial, Parallel };

Exec& default_exec();
int max_threads();
void set_threads(int n);

/// 2d+1-point masked stencil: y_i = diag_i x_i - sum_f faceW[i*faces+f] * x_{nbr},
/// where nbr < 0 encodes a Dirichlet-zero neighbor.
struct StencilData {
    const double* diag = nullptr;
    const double* face_w = nullptr;   // faces entries per node
    const std::int32_t* nbr = nullptr;
    int faces = 0;
    std::int64_t n = 0;
};

void apply_stencil(const StencilData& s, const double* x, double* y, Exec exec);

double dot(const double* a, const double* b, std::int64_t n, Exec exec);
void axpy(double alpha, const double* x, double* y, std::int64_t n, Exec exec);  // y += alpha x
void xpby(const double* x, double beta, double* y, std::int64_t n, Exec exec);   // y = x + beta y
void scale(double alpha, double* x, std::int64_t n, Exec exec);
double sup_abs(const double* x, std::int64_t n, Exec exec);

/// sum_i w_i |v_i|^p
double weighted_p_sum(const double* v, const double* w, double p, std::int64_t n, Exec exec);
/// out_i = w_i |v_i|^{p-2} v_i
void nonlinear_term(const double* v, const double* w, double p, double* out, std::int64_t n,
                    Exec exec);

inline double dot(const std::vector<double>& a, const std::vector<double>& b, Exec e) {
    return dot(a.data(), b.data(), static_cast<std::int64_t>(a.size()), e);
}

}  // namespace supercrit::kernels

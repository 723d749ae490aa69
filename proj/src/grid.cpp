#include "supercrit/grid.hpp"

#include <algorithm>
#include <cmath>

namespace supercrit::solver {

namespace {

MaskedGrid build_lattice(const Point& lo, int dim, double h, const std::array<int, 3>& n,
                         const std::function<bool(const Point&)>& inside) {
    MaskedGrid g;
    g.dim = dim;
    g.h = h;
    g.extents = n;
    for (int q = 0; q < dim; ++q) g.origin[q] = lo[q];

    const std::int64_t total = g.lattice_size();
    g.mask.assign(total, 0);
    g.compact.assign(total, -1);
    for (std::int64_t idx = 0; idx < total; ++idx) {
        const auto c = g.lattice_coords(idx);
        bool interior = true;  // keep one Dirichlet ring so every stencil fits
        for (int q = 0; q < dim; ++q)
            interior = interior && c[q] > 0 && c[q] < g.extents[q] - 1;
        if (interior && inside(g.point_at(idx))) g.mask[idx] = 1;
    }
    for (std::int64_t idx = 0; idx < total; ++idx)
        if (g.mask[idx]) {
            g.compact[idx] = static_cast<std::int32_t>(g.nodes.size());
            g.nodes.push_back(idx);
        }
    return g;
}

// True if some node has runs of >= `thick` inside nodes through it along
// every axis; a cheap stand-in for "the grid resolves the domain".
bool has_thick_core(const MaskedGrid& g, int thick) {
    for (const std::int64_t idx : g.nodes) {
        const auto c = g.lattice_coords(idx);
        bool ok = true;
        for (int axis = 0; axis < g.dim && ok; ++axis) {
            int run = 1;
            for (int s = 1; s < thick; ++s) {
                auto cc = c;
                cc[axis] = c[axis] + s;
                if (cc[axis] >= g.extents[axis] || !g.mask[g.lattice_index(cc[0], cc[1], cc[2])]) break;
                ++run;
            }
            for (int s = 1; s < thick; ++s) {
                auto cc = c;
                cc[axis] = c[axis] - s;
                if (cc[axis] < 0 || !g.mask[g.lattice_index(cc[0], cc[1], cc[2])]) break;
                ++run;
            }
            ok = run >= thick;
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace

MaskedGrid build_grid(const geometry::ProfileDomain& domain, double h, int margin_cells,
                      std::optional<int> reflect_axis) {
    if (h <= 0.0) throw ConfigError("grid spacing must be positive");
    if (domain.dimension != 2 && domain.dimension != 3)
        throw ConfigError("masked grids support dimension 2 or 3 only");

    const int d = domain.dimension;
    Point lo(d);
    std::array<int, 3> n = {1, 1, 1};
    for (int q = 0; q < d; ++q) {
        const double span = domain.box_hi[q] - domain.box_lo[q];
        int count = static_cast<int>(std::ceil(span / h)) + 1 + 2 * margin_cells;
        double o = domain.box_lo[q] - margin_cells * h;
        if (reflect_axis && *reflect_axis == q) {
            const double center = 0.5 * (domain.box_lo[q] + domain.box_hi[q]);
            if (count % 2 == 0) ++count;  // node on the reflection plane
            o = center - 0.5 * (count - 1) * h;
        }
        lo[q] = o;
        n[q] = count;
    }
    MaskedGrid g = build_lattice(lo, d, h, n, domain.inside);
    if (g.inside_count() == 0) throw ConfigError("grid mask is empty: domain not resolved");
    if (!has_thick_core(g, 8))
        throw ConfigError("grid under-resolves the domain (< 8 nodes across every feature)");
    return g;
}

MaskedGrid build_grid_box(const Point& lo, const Point& hi, double h,
                          const std::function<bool(const Point&)>& inside) {
    const int d = static_cast<int>(lo.size());
    std::array<int, 3> n = {1, 1, 1};
    for (int q = 0; q < d; ++q)
        n[q] = static_cast<int>(std::llround((hi[q] - lo[q]) / h)) + 1;
    MaskedGrid g = build_lattice(lo, d, h, n, inside);
    if (g.inside_count() == 0) throw ConfigError("grid mask is empty: domain not resolved");
    return g;
}

double Field::sup_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

FieldEvaluator::FieldEvaluator(const Field& f) {
    const MaskedGrid& g = *f.grid;
    dim_ = g.dim;
    origin_ = g.origin;
    h_ = g.h;
    extents_ = g.extents;

    // Scatter to the full lattice (zero extension), then turn node values into
    // B-spline coefficients with one tridiagonal (1 4 1)/6 solve per line and
    // axis. Zero coefficients beyond the lattice close the system; the built-in
    // margin keeps real data away from the edge.
    coeff_.assign(static_cast<std::size_t>(g.lattice_size()), 0.0);
    for (std::int64_t i = 0; i < g.inside_count(); ++i)
        coeff_[static_cast<std::size_t>(g.nodes[i])] = f.values[static_cast<std::size_t>(i)];

    std::array<std::int64_t, 3> stride = {1, extents_[0], std::int64_t(extents_[0]) * extents_[1]};
    std::vector<double> diag, rhs;
    for (int axis = 0; axis < dim_; ++axis) {
        const int n = extents_[axis];
        diag.assign(n, 0.0);
        rhs.assign(n, 0.0);
        const std::int64_t sa = stride[axis];
        // iterate over all lines along `axis`
        const int nb = extents_[(axis + 1) % 3], nc = extents_[(axis + 2) % 3];
        const std::int64_t sb = stride[(axis + 1) % 3], sc = stride[(axis + 2) % 3];
        for (int b = 0; b < nb; ++b)
            for (int c = 0; c < nc; ++c) {
                const std::int64_t base = b * sb + c * sc;
                // Thomas algorithm for (c_{i-1} + 4 c_i + c_{i+1})/6 = v_i
                double beta = 4.0 / 6.0;
                diag[0] = beta;
                rhs[0] = coeff_[base];
                for (int i = 1; i < n; ++i) {
                    const double m = (1.0 / 6.0) / diag[i - 1];
                    diag[i] = 4.0 / 6.0 - m * (1.0 / 6.0);
                    rhs[i] = coeff_[base + i * sa] - m * rhs[i - 1];
                }
                coeff_[base + (n - 1) * sa] = rhs[n - 1] / diag[n - 1];
                for (int i = n - 2; i >= 0; --i)
                    coeff_[base + i * sa] =
                        (rhs[i] - (1.0 / 6.0) * coeff_[base + (i + 1) * sa]) / diag[i];
            }
    }
}

FieldEvaluator::Basis FieldEvaluator::basis_1d(int axis, double x) const {
    const double t = (x - origin_[axis]) / h_;
    int cell = static_cast<int>(std::floor(t));
    cell = std::clamp(cell, -3, extents_[axis] + 1);
    const double u = t - cell;
    Basis b;
    b.base = cell - 1;
    const double v = 1.0 - u;
    b.w[0] = v * v * v / 6.0;
    b.w[1] = (3.0 * u * u * u - 6.0 * u * u + 4.0) / 6.0;
    b.w[2] = (-3.0 * u * u * u + 3.0 * u * u + 3.0 * u + 1.0) / 6.0;
    b.w[3] = u * u * u / 6.0;
    b.dw[0] = -0.5 * v * v / h_;
    b.dw[1] = (1.5 * u * u - 2.0 * u) / h_;
    b.dw[2] = (-1.5 * u * u + u + 0.5) / h_;
    b.dw[3] = 0.5 * u * u / h_;
    b.ddw[0] = v / (h_ * h_);
    b.ddw[1] = (3.0 * u - 2.0) / (h_ * h_);
    b.ddw[2] = (1.0 - 3.0 * u) / (h_ * h_);
    b.ddw[3] = u / (h_ * h_);
    return b;
}

bool FieldEvaluator::in_box(const Point& x) const {
    for (int q = 0; q < dim_; ++q) {
        const double hi = origin_[q] + h_ * (extents_[q] - 1);
        if (x[q] < origin_[q] || x[q] > hi) return false;
    }
    return true;
}

namespace {

template <typename F>
void for_support(const std::array<FieldEvaluator::Basis, 3>& bs, int dim,
                 const std::array<int, 3>& extents, F&& f) {
    const int kmax = dim == 3 ? 4 : 1;
    for (int k = 0; k < kmax; ++k) {
        const int kk = dim == 3 ? bs[2].base + k : 0;
        if (dim == 3 && (kk < 0 || kk >= extents[2])) continue;
        for (int j = 0; j < 4; ++j) {
            const int jj = bs[1].base + j;
            if (jj < 0 || jj >= extents[1]) continue;
            for (int i = 0; i < 4; ++i) {
                const int ii = bs[0].base + i;
                if (ii < 0 || ii >= extents[0]) continue;
                f(i, j, k, ii, jj, kk);
            }
        }
    }
}

}  // namespace

double FieldEvaluator::value(const Point& x) const {
    std::array<Basis, 3> bs;
    for (int q = 0; q < dim_; ++q) bs[q] = basis_1d(q, x[q]);
    double s = 0.0;
    for_support(bs, dim_, extents_, [&](int i, int j, int k, int ii, int jj, int kk) {
        const double c = coeff_[(std::int64_t(kk) * extents_[1] + jj) * extents_[0] + ii];
        double w = bs[0].w[i] * bs[1].w[j];
        if (dim_ == 3) w *= bs[2].w[k];
        s += c * w;
    });
    return s;
}

Point FieldEvaluator::gradient(const Point& x) const {
    std::array<Basis, 3> bs;
    for (int q = 0; q < dim_; ++q) bs[q] = basis_1d(q, x[q]);
    Point g(dim_, 0.0);
    for_support(bs, dim_, extents_, [&](int i, int j, int k, int ii, int jj, int kk) {
        const double c = coeff_[(std::int64_t(kk) * extents_[1] + jj) * extents_[0] + ii];
        const double wz = dim_ == 3 ? bs[2].w[k] : 1.0;
        g[0] += c * bs[0].dw[i] * bs[1].w[j] * wz;
        g[1] += c * bs[0].w[i] * bs[1].dw[j] * wz;
        if (dim_ == 3) g[2] += c * bs[0].w[i] * bs[1].w[j] * bs[2].dw[k];
    });
    return g;
}

double FieldEvaluator::laplacian(const Point& x) const {
    std::array<Basis, 3> bs;
    for (int q = 0; q < dim_; ++q) bs[q] = basis_1d(q, x[q]);
    double s = 0.0;
    for_support(bs, dim_, extents_, [&](int i, int j, int k, int ii, int jj, int kk) {
        const double c = coeff_[(std::int64_t(kk) * extents_[1] + jj) * extents_[0] + ii];
        const double wz = dim_ == 3 ? bs[2].w[k] : 1.0;
        double acc = bs[0].ddw[i] * bs[1].w[j] * wz + bs[0].w[i] * bs[1].ddw[j] * wz;
        if (dim_ == 3) acc += bs[0].w[i] * bs[1].w[j] * bs[2].ddw[k];
        s += c * acc;
    });
    return s;
}

}  // namespace supercrit::solver

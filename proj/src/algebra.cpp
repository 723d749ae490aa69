#include "supercrit/algebra.hpp"

#include <cmath>
#include <span>

namespace supercrit::algebra {

namespace {

void check_dim(int dim) {
    if (!AlgebraElement::valid_dim(dim))
        throw std::invalid_argument("algebra dimension must be 1, 2, 4 or 8");
}

// Recursive Cayley-Dickson product on coefficient spans.
// out = (a1 c1 - conj(d) b1, d a1 + b1 conj(c1)) for a = (a1,b1), b = (c1,d).
void conj_span(std::span<const double> a, std::span<double> out) {
    out[0] = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) out[i] = -a[i];
}

void mul_span(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    const std::size_t n = a.size();
    if (n == 1) {
        out[0] = a[0] * b[0];
        return;
    }
    const std::size_t h = n / 2;
    std::array<double, 4> buf1{}, buf2{}, buf3{};
    std::span<double> t1(buf1.data(), h), t2(buf2.data(), h), cj(buf3.data(), h);

    auto a1 = a.first(h), a2 = a.subspan(h);
    auto b1 = b.first(h), b2 = b.subspan(h);

    // first half: a1*b1 - conj(b2)*a2
    mul_span(a1, b1, t1);
    conj_span(b2, cj);
    mul_span(cj, a2, t2);
    for (std::size_t i = 0; i < h; ++i) out[i] = t1[i] - t2[i];

    // second half: b2*a1 + a2*conj(b1)
    mul_span(b2, a1, t1);
    conj_span(b1, cj);
    mul_span(a2, cj, t2);
    for (std::size_t i = 0; i < h; ++i) out[h + i] = t1[i] + t2[i];
}

}  // namespace

AlgebraElement AlgebraElement::zero(int dim) {
    check_dim(dim);
    AlgebraElement r;
    r.dim = dim;
    return r;
}

AlgebraElement AlgebraElement::unit(int dim, int axis) {
    check_dim(dim);
    if (axis < 0 || axis >= dim) throw std::invalid_argument("basis axis out of range");
    AlgebraElement r;
    r.dim = dim;
    r.c[axis] = 1.0;
    return r;
}

double AlgebraElement::norm_sq() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += c[i] * c[i];
    return s;
}

double AlgebraElement::norm() const { return std::sqrt(norm_sq()); }

AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.dim != b.dim) throw std::invalid_argument("algebra dimension mismatch in mul");
    AlgebraElement r;
    r.dim = a.dim;
    mul_span(std::span<const double>(a.c.data(), a.dim),
             std::span<const double>(b.c.data(), b.dim),
             std::span<double>(r.c.data(), a.dim));
    return r;
}

AlgebraElement conjugate(const AlgebraElement& a) {
    AlgebraElement r = a;
    for (int i = 1; i < a.dim; ++i) r.c[i] = -a.c[i];
    return r;
}

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.dim != b.dim) throw std::invalid_argument("algebra dimension mismatch in add");
    AlgebraElement r = a;
    for (int i = 0; i < a.dim; ++i) r.c[i] += b.c[i];
    return r;
}

AlgebraElement scale(double s, const AlgebraElement& a) {
    AlgebraElement r = a;
    for (int i = 0; i < a.dim; ++i) r.c[i] *= s;
    return r;
}

HopfPoint::HopfPoint(AlgebraElement a, AlgebraElement b) : z1(std::move(a)), z2(std::move(b)) {
    if (z1.dim != z2.dim) throw std::invalid_argument("HopfPoint components must share a dimension");
}

Point HopfPoint::coords() const {
    Point x(2 * z1.dim);
    for (int i = 0; i < z1.dim; ++i) {
        x[i] = z1.c[i];
        x[z1.dim + i] = z2.c[i];
    }
    return x;
}

HopfPoint HopfPoint::from_coords(int dim, const Point& x) {
    check_dim(dim);
    if (static_cast<int>(x.size()) != 2 * dim)
        throw std::invalid_argument("coordinate count must equal 2*dim");
    AlgebraElement a = AlgebraElement::zero(dim), b = AlgebraElement::zero(dim);
    for (int i = 0; i < dim; ++i) {
        a.c[i] = x[i];
        b.c[i] = x[dim + i];
    }
    return HopfPoint(a, b);
}

Point hopf_map(const HopfPoint& p) {
    const int d = p.algebra_dim();
    AlgebraElement first = scale(2.0, mul(conjugate(p.z1), p.z2));
    Point w(d + 1);
    for (int i = 0; i < d; ++i) w[i] = first.c[i];
    w[d] = p.z1.norm_sq() - p.z2.norm_sq();
    return w;
}

double dilation_sq(const HopfPoint& p, const DilationModel& model) {
    return model.c_star * p.norm_sq();
}

double fd_laplacian(const ScalarField& v, const Point& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("fd_laplacian: step must be positive");
    double s = 0.0;
    Point y = x;
    const double center = v(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        const double up = v(y);
        y[i] = x[i] - h;
        const double dn = v(y);
        y[i] = x[i];
        s += (up - 2.0 * center + dn) / (h * h);
    }
    return s;
}

double morphism_residual(const ScalarField& v, const HopfPoint& p, double h,
                         const DilationModel& model) {
    if (h <= 0.0) throw std::invalid_argument("morphism_residual: step must be positive");
    const int d = p.algebra_dim();
    const ScalarField composed = [&](const Point& x) {
        return v(hopf_map(HopfPoint::from_coords(d, x)));
    };
    const double lap_total = fd_laplacian(composed, p.coords(), h);
    const double lap_reduced = fd_laplacian(v, hopf_map(p), h);
    return std::abs(lap_total - dilation_sq(p, model) * lap_reduced);
}

DilationModel DilationModel::calibrated(double h) {
    // v = |w|^2 on the complex Hopf map: both Laplacians are nonzero constants
    // (times |pi|), so the ratio pins the conformal factor.
    const ScalarField v = [](const Point& w) { return norm_sq(w); };
    AlgebraElement z1 = AlgebraElement::zero(2), z2 = AlgebraElement::zero(2);
    z1.c = {0.4, -0.3};
    z2.c = {0.8, 0.5};
    const HopfPoint p(z1, z2);

    const int d = p.algebra_dim();
    const ScalarField composed = [&](const Point& x) {
        return v(hopf_map(HopfPoint::from_coords(d, x)));
    };
    const double lap_total = fd_laplacian(composed, p.coords(), h);
    const double lap_reduced = fd_laplacian(v, hopf_map(p), h);
    const double ratio = lap_total / (lap_reduced * norm(hopf_map(p)));

    DilationModel m;
    m.c_star = std::round(ratio);
    if (std::abs(m.c_star - ratio) > 1e-3)
        throw std::runtime_error("dilation calibration did not land near an integer constant");
    return m;
}

}  // namespace supercrit::algebra

#include "supercrit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace supercrit::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Linear sampling densities from the generator defaults.
constexpr double kLineDensity = 256.0;   // samples per unit boundary length (2-D)
constexpr double kSurfDensity = 32.0;    // samples per unit length per direction (3-D)

int at_least(int n, int lo) { return std::max(n, lo); }

double surface_area_unit_sphere(int d) {
    // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

Point axis_point(int dim, double t) {
    Point p(dim, 0.0);
    p[0] = t;
    return p;
}

double pole_exclusion_radius(const ProfileDomain& profile) {
    // "angular distance 1e-3" scaled to the profile size.
    double diag = 0.0;
    for (int i = 0; i < profile.dimension; ++i) {
        const double e = profile.box_hi[i] - profile.box_lo[i];
        diag += e * e;
    }
    return 1e-3 * 0.5 * std::sqrt(diag);
}

}  // namespace

double ProfileDomain::boundary_measure() const {
    double s = 0.0;
    for (const auto& b : boundary) s += b.weight;
    return s;
}

ProfileDomain make_ball(const Point& center, double radius, double density_scale,
                        std::uint64_t seed) {
    const int d = static_cast<int>(center.size());
    if (d < 2) throw std::invalid_argument("ball profile needs dimension >= 2");
    if (radius <= 0.0) throw std::invalid_argument("ball profile needs a positive radius");
    if (density_scale <= 0.0) throw std::invalid_argument("density scale must be positive");

    ProfileDomain p;
    p.dimension = d;
    p.kind = "ball";
    p.parameters = {{"center", center}, {"radius", radius}};
    Point c = center;
    p.inside = [c, radius](const Point& x) { return norm(sub(x, c)) < radius; };
    p.box_lo.resize(d);
    p.box_hi.resize(d);
    for (int i = 0; i < d; ++i) {
        p.box_lo[i] = center[i] - radius;
        p.box_hi[i] = center[i] + radius;
    }

    if (d == 2) {
        const int n = at_least(static_cast<int>(std::ceil(kLineDensity * density_scale * kTwoPi * radius)), 16);
        const double w = kTwoPi * radius / n;
        for (int j = 0; j < n; ++j) {
            const double th = kTwoPi * (j + 0.5) / n;
            Point nu = {std::cos(th), std::sin(th)};
            p.boundary.push_back({{center[0] + radius * nu[0], center[1] + radius * nu[1]}, nu, w});
        }
    } else if (d == 3) {
        const double lin = kSurfDensity * density_scale;
        const int nth = at_least(static_cast<int>(std::ceil(lin * std::numbers::pi * radius)), 8);
        for (int i = 0; i < nth; ++i) {
            const double a = std::numbers::pi * i / nth, b = std::numbers::pi * (i + 1) / nth;
            const double th = 0.5 * (a + b);
            const int nph = at_least(static_cast<int>(std::ceil(lin * kTwoPi * radius * std::sin(th))), 4);
            const double band = radius * radius * (std::cos(a) - std::cos(b)) * kTwoPi / nph;
            for (int j = 0; j < nph; ++j) {
                const double ph = kTwoPi * (j + 0.5) / nph;
                Point nu = {std::cos(th), std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph)};
                Point x(3);
                for (int q = 0; q < 3; ++q) x[q] = center[q] + radius * nu[q];
                p.boundary.push_back({x, nu, band});
            }
        }
    } else {
        // High dimensions: uniform random directions with equal weights.
        Rng rng(seed);
        const double area = surface_area_unit_sphere(d) * std::pow(radius, d - 1);
        const int n = at_least(static_cast<int>(256 * density_scale) * d * d, 1024);
        p.parameters["seed"] = seed;
        for (int j = 0; j < n; ++j) {
            Point nu = rng.unit_vector(d);
            Point x(d);
            for (int q = 0; q < d; ++q) x[q] = center[q] + radius * nu[q];
            p.boundary.push_back({x, nu, area / n});
        }
    }
    return p;
}

ProfileDomain make_annulus_sector(int dimension, double r0, double r1, double half_angle,
                                  double density_scale) {
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("annulus sector supports dimension 2 or 3");
    if (!(0.0 < r0 && r0 < r1)) throw std::invalid_argument("annulus needs 0 < r0 < r1");
    if (!(0.0 < half_angle && half_angle <= std::numbers::pi + 1e-12))
        throw std::invalid_argument("annulus half-angle must lie in (0, pi]");
    const bool full = half_angle >= std::numbers::pi - 1e-12;

    ProfileDomain p;
    p.dimension = dimension;
    p.kind = "annulus_sector";
    p.parameters = {{"dimension", dimension}, {"r0", r0}, {"r1", r1}, {"half_angle", half_angle}};
    p.inside = [r0, r1, half_angle, full](const Point& x) {
        const double r = norm(x);
        if (!(r0 < r && r < r1)) return false;
        if (full) return true;
        return std::acos(std::clamp(x[0] / r, -1.0, 1.0)) < half_angle;
    };
    p.box_lo.assign(dimension, -r1);
    p.box_hi.assign(dimension, r1);

    if (dimension == 2) {
        auto arc = [&](double r, double sign) {  // sign +1: outward normal along radius
            const int n = at_least(static_cast<int>(std::ceil(kLineDensity * density_scale * 2.0 * half_angle * r)), 16);
            const double w = 2.0 * half_angle * r / n;
            for (int j = 0; j < n; ++j) {
                const double th = -half_angle + 2.0 * half_angle * (j + 0.5) / n;
                Point dir = {std::cos(th), std::sin(th)};
                p.boundary.push_back({{r * dir[0], r * dir[1]}, {sign * dir[0], sign * dir[1]}, w});
            }
        };
        arc(r1, +1.0);
        arc(r0, -1.0);
        if (!full) {
            auto edge = [&](double sgn) {  // radial edge at angle sgn*half_angle
                const int n = at_least(static_cast<int>(std::ceil(kLineDensity * density_scale * (r1 - r0))), 8);
                const double w = (r1 - r0) / n;
                const double ca = std::cos(half_angle), sa = std::sin(half_angle);
                const Point normal = {-sa, sgn * ca};
                for (int j = 0; j < n; ++j) {
                    const double r = r0 + (r1 - r0) * (j + 0.5) / n;
                    p.boundary.push_back({{r * ca, sgn * r * sa}, normal, w});
                }
            };
            edge(+1.0);
            edge(-1.0);
        }
    } else {
        const double lin = kSurfDensity * density_scale;
        auto cap = [&](double r, double sign) {
            const int nth = at_least(static_cast<int>(std::ceil(lin * half_angle * r)), 8);
            for (int i = 0; i < nth; ++i) {
                const double a = half_angle * i / nth, b = half_angle * (i + 1) / nth;
                const double th = 0.5 * (a + b);
                const int nph = at_least(static_cast<int>(std::ceil(lin * kTwoPi * r * std::sin(th))), 4);
                const double band = r * r * (std::cos(a) - std::cos(b)) * kTwoPi / nph;
                for (int j = 0; j < nph; ++j) {
                    const double ph = kTwoPi * (j + 0.5) / nph;
                    Point dir = {std::cos(th), std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph)};
                    p.boundary.push_back({{r * dir[0], r * dir[1], r * dir[2]},
                                          {sign * dir[0], sign * dir[1], sign * dir[2]},
                                          band});
                }
            }
        };
        cap(r1, +1.0);
        cap(r0, -1.0);
        if (!full) {
            // Cone surface at polar angle = half_angle, outward normal tilts away
            // from the sector.
            const double ca = std::cos(half_angle), sa = std::sin(half_angle);
            const int ns = at_least(static_cast<int>(std::ceil(lin * (r1 - r0))), 8);
            for (int i = 0; i < ns; ++i) {
                const double s = r0 + (r1 - r0) * (i + 0.5) / ns;
                const int nph = at_least(static_cast<int>(std::ceil(lin * kTwoPi * s * sa)), 4);
                const double w = (r1 - r0) / ns * kTwoPi * s * sa / nph;
                for (int j = 0; j < nph; ++j) {
                    const double ph = kTwoPi * (j + 0.5) / nph;
                    p.boundary.push_back({{s * ca, s * sa * std::cos(ph), s * sa * std::sin(ph)},
                                          {-sa, ca * std::cos(ph), ca * std::sin(ph)},
                                          w});
                }
            }
        }
    }
    return p;
}

ProfileDomain make_dumbbell(int dimension, double t_left, double t_right, double radius,
                            double neck_half_width, double density_scale) {
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("dumbbell supports dimension 2 or 3");
    if (radius <= 0.0 || neck_half_width <= 0.0 || neck_half_width >= radius)
        throw std::invalid_argument("dumbbell needs 0 < neck half-width < radius");
    if (t_right - t_left < 2.0 * radius)
        throw std::invalid_argument("dumbbell ball centers must be at least 2*radius apart");

    ProfileDomain p;
    p.dimension = dimension;
    p.kind = "dumbbell";
    p.parameters = {{"dimension", dimension}, {"t_left", t_left}, {"t_right", t_right},
                    {"radius", radius}, {"neck_half_width", neck_half_width}};

    auto z_norm = [dimension](const Point& x) {
        double s = 0.0;
        for (int i = 1; i < dimension; ++i) s += x[i] * x[i];
        return std::sqrt(s);
    };
    auto ball_dist = [dimension](const Point& x, double tc) {
        double s = (x[0] - tc) * (x[0] - tc);
        for (int i = 1; i < dimension; ++i) s += x[i] * x[i];
        return std::sqrt(s);
    };
    const double w = neck_half_width;
    p.inside = [=](const Point& x) {
        if (ball_dist(x, t_left) < radius || ball_dist(x, t_right) < radius) return true;
        return x[0] > t_left && x[0] < t_right && z_norm(x) < w;
    };
    p.box_lo.assign(dimension, -radius);
    p.box_hi.assign(dimension, radius);
    p.box_lo[0] = t_left - radius;
    p.box_hi[0] = t_right + radius;

    const double junction = std::sqrt(radius * radius - w * w);
    const double ta = t_left + junction, tb = t_right - junction;

    auto keep = [&](const Point& x, double own_center) {
        const double other = (own_center == t_left) ? t_right : t_left;
        if (ball_dist(x, other) < radius - 1e-12) return false;
        return !(x[0] > t_left + 1e-12 && x[0] < t_right - 1e-12 && z_norm(x) < w - 1e-12);
    };

    if (dimension == 2) {
        auto circle = [&](double tc) {
            const int n = at_least(static_cast<int>(std::ceil(kLineDensity * density_scale * kTwoPi * radius)), 32);
            const double wq = kTwoPi * radius / n;
            for (int j = 0; j < n; ++j) {
                const double th = kTwoPi * (j + 0.5) / n;
                Point nu = {std::cos(th), std::sin(th)};
                Point x = {tc + radius * nu[0], radius * nu[1]};
                if (keep(x, tc)) p.boundary.push_back({x, nu, wq});
            }
        };
        circle(t_left);
        circle(t_right);
        for (double sgn : {+1.0, -1.0}) {
            const int n = at_least(static_cast<int>(std::ceil(kLineDensity * density_scale * (tb - ta))), 8);
            const double wq = (tb - ta) / n;
            for (int j = 0; j < n; ++j) {
                const double t = ta + (tb - ta) * (j + 0.5) / n;
                p.boundary.push_back({{t, sgn * w}, {0.0, sgn}, wq});
            }
        }
    } else {
        const double lin = kSurfDensity * density_scale;
        auto sphere = [&](double tc) {
            const int nth = at_least(static_cast<int>(std::ceil(lin * std::numbers::pi * radius)), 8);
            for (int i = 0; i < nth; ++i) {
                const double a = std::numbers::pi * i / nth, b = std::numbers::pi * (i + 1) / nth;
                const double th = 0.5 * (a + b);
                const int nph = at_least(static_cast<int>(std::ceil(lin * kTwoPi * radius * std::sin(th))), 4);
                const double band = radius * radius * (std::cos(a) - std::cos(b)) * kTwoPi / nph;
                for (int j = 0; j < nph; ++j) {
                    const double ph = kTwoPi * (j + 0.5) / nph;
                    Point nu = {std::cos(th), std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph)};
                    Point x = {tc + radius * nu[0], radius * nu[1], radius * nu[2]};
                    if (keep(x, tc)) p.boundary.push_back({x, nu, band});
                }
            }
        };
        sphere(t_left);
        sphere(t_right);
        const int ns = at_least(static_cast<int>(std::ceil(lin * (tb - ta))), 8);
        for (int i = 0; i < ns; ++i) {
            const double t = ta + (tb - ta) * (i + 0.5) / ns;
            const int nph = at_least(static_cast<int>(std::ceil(lin * kTwoPi * w)), 8);
            const double wq = (tb - ta) / ns * kTwoPi * w / nph;
            for (int j = 0; j < nph; ++j) {
                const double ph = kTwoPi * (j + 0.5) / nph;
                p.boundary.push_back({{t, w * std::cos(ph), w * std::sin(ph)},
                                      {0.0, std::cos(ph), std::sin(ph)},
                                      wq});
            }
        }
    }
    return p;
}

ProfileDomain make_polygon(const std::vector<Point>& vertices, double density_scale) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    for (const auto& v : vertices)
        if (v.size() != 2) throw std::invalid_argument("polygon vertices must be 2-D");

    std::vector<Point> vs = vertices;
    double area2 = 0.0;
    const std::size_t n = vs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = vs[i];
        const auto& b = vs[(i + 1) % n];
        area2 += a[0] * b[1] - b[0] * a[1];
    }
    if (std::abs(area2) < 1e-14) throw std::invalid_argument("polygon is degenerate");
    if (area2 < 0.0) std::reverse(vs.begin(), vs.end());  // enforce CCW order

    ProfileDomain p;
    p.dimension = 2;
    p.kind = "polygon";
    p.geo_tol = 1e-4;
    {
        nlohmann::ordered_json jv = nlohmann::ordered_json::array();
        for (const auto& v : vs) jv.push_back(v);
        p.parameters = {{"vertices", jv}};
    }
    p.inside = [vs](const Point& x) {
        // even-odd ray cast
        bool in = false;
        const std::size_t m = vs.size();
        for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
            const bool crosses = (vs[i][1] > x[1]) != (vs[j][1] > x[1]);
            if (crosses) {
                const double xi = (vs[j][0] - vs[i][0]) * (x[1] - vs[i][1]) / (vs[j][1] - vs[i][1]) + vs[i][0];
                if (x[0] < xi) in = !in;
            }
        }
        return in;
    };
    p.box_lo = vs[0];
    p.box_hi = vs[0];
    for (const auto& v : vs)
        for (int i = 0; i < 2; ++i) {
            p.box_lo[i] = std::min(p.box_lo[i], v[i]);
            p.box_hi[i] = std::max(p.box_hi[i], v[i]);
        }

    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = vs[i];
        const auto& b = vs[(i + 1) % n];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double len = std::hypot(ex, ey);
        Point nu = {ey / len, -ex / len};  // outward for CCW orientation
        const int m = at_least(static_cast<int>(std::ceil(kLineDensity * density_scale * len)), 4);
        const double wq = len / m;
        for (int j = 0; j < m; ++j) {
            const double s = (j + 0.5) / m;
            p.boundary.push_back({{a[0] + s * ex, a[1] + s * ey}, nu, wq});
        }
    }
    return p;
}

ProfileDomain make_profile(const std::string& kind, const nlohmann::ordered_json& parameters,
                           double density_scale) {
    try {
        if (kind == "ball") {
            const Point center = parameters.at("center").get<Point>();
            const double radius = parameters.at("radius").get<double>();
            const std::uint64_t seed = parameters.value("seed", 42);
            return make_ball(center, radius, density_scale, seed);
        }
        if (kind == "annulus_sector") {
            return make_annulus_sector(parameters.at("dimension").get<int>(),
                                       parameters.at("r0").get<double>(),
                                       parameters.at("r1").get<double>(),
                                       parameters.at("half_angle").get<double>(), density_scale);
        }
        if (kind == "dumbbell") {
            return make_dumbbell(parameters.at("dimension").get<int>(),
                                 parameters.at("t_left").get<double>(),
                                 parameters.at("t_right").get<double>(),
                                 parameters.at("radius").get<double>(),
                                 parameters.at("neck_half_width").get<double>(), density_scale);
        }
        if (kind == "polygon") {
            std::vector<Point> vertices;
            for (const auto& v : parameters.at("vertices")) vertices.push_back(v.get<Point>());
            return make_polygon(vertices, density_scale);
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("bad profile parameters for kind '" + kind + "': " + e.what());
    }
    throw std::invalid_argument("unknown profile kind '" + kind + "'");
}

double phi(double t, double tau, int k) {
    if (t <= 0.0) throw std::invalid_argument("phi: t must be positive");
    if (tau <= 0.0) throw std::invalid_argument("phi: tau must be positive");
    if (k < 0) throw std::invalid_argument("phi: multiplicity must be >= 0");
    return (1.0 - std::pow(tau / t, k + 1)) / (k + 1);
}

double phi_prime(double t, double tau, int k) {
    if (t <= 0.0) throw std::invalid_argument("phi_prime: t must be positive");
    return std::pow(tau, k + 1) / std::pow(t, k + 2);
}

int ChiParams::total_multiplicity() const {
    int k = 0;
    for (int ki : multiplicities) k += ki;
    return k;
}

void ChiParams::validate() const {
    if (taus.size() != multiplicities.size() || taus.empty())
        throw std::invalid_argument("chi params: taus and multiplicities must pair up");
    for (double t : taus)
        if (t <= 0.0) throw std::invalid_argument("chi params: tau_i must be positive");
    int block_dims = 0;
    for (int k : multiplicities) {
        if (k < 0) throw std::invalid_argument("chi params: multiplicities must be >= 0");
        block_dims += k + 1;
    }
    if (ambient_dim < block_dims)
        throw std::invalid_argument("chi params: ambient dimension too small for the blocks");
}

ChiEval chi_eval(const Point& x, const ChiParams& params) {
    params.validate();
    if (static_cast<int>(x.size()) != params.ambient_dim)
        throw std::invalid_argument("chi_eval: point dimension mismatch");

    ChiEval out;
    out.vector.resize(x.size());
    out.quad_bound = 1.0;
    int off = 0;
    for (int i = 0; i < params.block_count(); ++i) {
        const int bd = params.multiplicities[i] + 1;
        double r2 = 0.0;
        for (int q = 0; q < bd; ++q) r2 += x[off + q] * x[off + q];
        const double r = std::sqrt(r2);
        if (r == 0.0) throw std::domain_error("chi_eval: chi is singular on {y^i = 0}");
        const double ph = phi(r, params.taus[i], params.multiplicities[i]);
        for (int q = 0; q < bd; ++q) out.vector[off + q] = ph * x[off + q];
        out.quad_bound = std::max(out.quad_bound, 1.0 - params.multiplicities[i] * ph);
        off += bd;
    }
    for (std::size_t q = off; q < x.size(); ++q) out.vector[q] = x[q];
    out.divergence = params.ambient_dim - params.total_multiplicity();
    return out;
}

namespace {

StarshapeVerdict finish(StarshapeVerdict v) {
    v.pass = v.witnesses.empty();
    return v;
}

}  // namespace

StarshapeVerdict doubly_starshaped_check(const ProfileDomain& profile, double t0, double t1) {
    if (!(0.0 < t0 && t0 < t1))
        throw std::invalid_argument("doubly_starshaped_check needs 0 < t0 < t1");

    StarshapeVerdict v;
    v.t0 = t0;
    v.t1 = t1;
    const double excl = pole_exclusion_radius(profile);
    const Point xi0 = axis_point(profile.dimension, t0);
    const Point xi1 = axis_point(profile.dimension, t1);
    const double tol = profile.geo_tol;

    for (const auto& b : profile.boundary) {
        // containment: first coordinates within [t0, t1] (boundary may touch)
        if (b.point[0] < t0 - tol || b.point[0] > t1 + tol)
            v.witnesses.push_back({b.point, b.point[0], "containment"});
        const bool near_pole = norm(sub(b.point, xi0)) < excl || norm(sub(b.point, xi1)) < excl;
        if (near_pole) continue;
        const double ip0 = dot(sub(b.point, xi0), b.normal);
        const double ip1 = dot(sub(b.point, xi1), b.normal);
        if (ip0 <= tol) v.witnesses.push_back({b.point, ip0, "starshape_xi0"});
        if (ip1 <= tol) v.witnesses.push_back({b.point, ip1, "starshape_xi1"});
    }
    return finish(std::move(v));
}

StarshapeVerdict boundary_flux_check(const ProfileDomain& profile, const ChiParams& params) {
    params.validate();
    if (params.block_count() != 1)
        throw ConfigError("boundary_flux_check supports a single rotation block only");
    const double tau = params.taus[0];
    const int k = params.multiplicities[0];

    StarshapeVerdict v;
    v.t0 = tau;
    double t_max = tau;
    for (const auto& b : profile.boundary) t_max = std::max(t_max, b.point[0]);
    v.t1 = t_max;

    const double excl = pole_exclusion_radius(profile);
    const Point xi0 = axis_point(profile.dimension, tau);
    const Point xi1 = axis_point(profile.dimension, t_max);
    const double tol = profile.geo_tol;

    for (const auto& b : profile.boundary) {
        if (b.point[0] <= 0.0)
            throw std::domain_error("boundary_flux_check: sample with nonpositive first coordinate");
        if (norm(sub(b.point, xi0)) < excl || norm(sub(b.point, xi1)) < excl) continue;
        const double t = b.point[0];
        double flux = phi(t, tau, k) * t * b.normal[0];
        for (int q = 1; q < profile.dimension; ++q) flux += b.point[q] * b.normal[q];
        if (flux <= tol) v.witnesses.push_back({b.point, flux, "flux"});
    }
    return finish(std::move(v));
}

StarshapeVerdict product_flux_check(const ProfileDomain& profile, const ChiParams& params) {
    params.validate();
    const int m = params.block_count();
    if (profile.dimension < m)
        throw std::invalid_argument("product_flux_check: profile dimension below block count");

    StarshapeVerdict v;
    const double tol = profile.geo_tol;
    for (const auto& b : profile.boundary) {
        double flux = 0.0;
        for (int i = 0; i < m; ++i) {
            const double t = b.point[i];
            if (t <= 0.0)
                throw std::domain_error("product_flux_check: sample with nonpositive block radius");
            flux += phi(t, params.taus[i], params.multiplicities[i]) * t * b.normal[i];
        }
        for (int q = m; q < profile.dimension; ++q) flux += b.point[q] * b.normal[q];
        if (flux <= tol) v.witnesses.push_back({b.point, flux, "flux"});
    }
    return finish(std::move(v));
}

double solve_rho(double alpha, const ChiParams& params) {
    params.validate();
    const int N = params.ambient_dim;
    const int k = params.total_multiplicity();
    if (k < 1) throw std::invalid_argument("solve_rho: at least one positive multiplicity required");
    if (!(1.0 < alpha && alpha < 0.5 * (N - k)))
        throw std::invalid_argument("solve_rho: alpha must lie in (1, (N-k)/2)");

    const double tau_min = *std::min_element(params.taus.begin(), params.taus.end());
    const auto g = [&](double rho) {
        double mx = -kInf;
        for (int i = 0; i < params.block_count(); ++i)
            mx = std::max(mx, 1.0 - params.multiplicities[i] *
                                     phi(params.taus[i] - rho, params.taus[i], params.multiplicities[i]));
        return mx - alpha;
    };

    // g is continuous and strictly increasing from 1 - alpha < 0 to +inf.
    double lo = 0.0, hi = tau_min * (1.0 - 1e-12);
    double best = hi, best_res = kInf;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double val = g(mid);
        if (std::abs(val) < best_res) {
            best_res = std::abs(val);
            best = mid;
        }
        if (val > 0.0) hi = mid;
        else lo = mid;
        if (hi - lo < 1e-17 * tau_min) break;
    }
    if (best_res > 1e-10)
        throw std::runtime_error("solve_rho: bisection failed to reach the residual target");
    return best;
}

StarshapeVerdict k_monotonicity_check(const Scalar& K, const Gradient& gradK,
                                      const std::vector<Point>& samples, int y_dim, double tol) {
    if (samples.empty()) throw std::invalid_argument("k_monotonicity_check: no samples");

    // Spot-check gradK against finite differences of K.
    const std::size_t spot = std::min<std::size_t>(samples.size(), 8);
    for (std::size_t s = 0; s < spot; ++s) {
        const Point& x = samples[s * samples.size() / spot];
        const Point g = gradK(x);
        Point fd(x.size());
        Point y = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double h = 1e-6 * (1.0 + std::abs(x[i]));
            y[i] = x[i] + h;
            const double up = K(y);
            y[i] = x[i] - h;
            const double dn = K(y);
            y[i] = x[i];
            fd[i] = (up - dn) / (2.0 * h);
        }
        const double scale = std::max(norm(g), 1e-12);
        if (norm(sub(fd, g)) > 0.01 * scale + 1e-9)
            throw std::invalid_argument("k_monotonicity_check: gradK inconsistent with K");
    }

    StarshapeVerdict v;
    for (const auto& x : samples) {
        const Point g = gradK(x);
        double sy = 0.0, sz = 0.0;
        for (int i = 0; i < static_cast<int>(x.size()); ++i)
            (i < y_dim ? sy : sz) += x[i] * g[i];
        if (sy > tol) v.witnesses.push_back({x, sy, "K_y"});
        if (sz > tol) v.witnesses.push_back({x, sz, "K_z"});
    }
    return finish(std::move(v));
}

std::vector<Point> sample_interior(const ProfileDomain& profile, int count, Rng& rng) {
    std::vector<Point> pts;
    pts.reserve(count);
    const int max_tries = 20000 * std::max(count, 1);
    int tries = 0;
    while (static_cast<int>(pts.size()) < count) {
        if (++tries > max_tries)
            throw ConfigError("sample_interior: rejection sampling failed (domain too thin?)");
        Point x(profile.dimension);
        for (int i = 0; i < profile.dimension; ++i)
            x[i] = rng.uniform(profile.box_lo[i], profile.box_hi[i]);
        if (profile.inside(x)) pts.push_back(std::move(x));
    }
    return pts;
}

}  // namespace supercrit::geometry

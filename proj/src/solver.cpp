#include "supercrit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

namespace supercrit::solver {

using kernels::Exec;

void DiscreteOperator::apply(const std::vector<double>& x, std::vector<double>& y,
                             Exec exec) const {
    y.resize(x.size());
    kernels::apply_stencil(stencil(), x.data(), y.data(), exec);
}

DiscreteOperator assemble(const reduction::WeightedEllipticProblem& problem,
                          std::shared_ptr<const MaskedGrid> grid) {
    const MaskedGrid& g = *grid;
    if (g.dim != problem.d)
        throw ConfigError("assemble: grid dimension does not match the problem");

    DiscreteOperator op;
    op.grid = grid;
    op.faces = 2 * g.dim;
    op.p = problem.p;
    op.cell_volume = g.cell_volume();

    const std::int64_t n = g.inside_count();
    op.diag.assign(n, 0.0);
    op.face_w.assign(n * op.faces, 0.0);
    op.nbr.assign(n * op.faces, -1);
    op.Q.assign(n, 0.0);
    op.c0.assign(n, 0.0);

    const double inv_h2 = 1.0 / (g.h * g.h);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t lat = g.nodes[i];
        const auto c = g.lattice_coords(lat);
        const Point xi = g.point_at(lat);
        const double ai = problem.weight_a(xi);
        if (!(ai > 0.0)) throw std::domain_error("assemble: weight a must be positive");
        op.Q[i] = problem.coeff_Q(xi);
        if (!(op.Q[i] > 0.0)) throw std::domain_error("assemble: coefficient Q must be positive");
        op.c0[i] = problem.linear_c0 ? problem.linear_c0(xi) : 0.0;

        double diag = op.c0[i];
        int f = 0;
        for (int axis = 0; axis < g.dim; ++axis) {
            for (int dir = -1; dir <= 1; dir += 2, ++f) {
                auto cc = c;
                cc[axis] += dir;
                const std::int64_t nlat = g.lattice_index(cc[0], cc[1], cc[2]);
                const double a_face = 0.5 * (ai + problem.weight_a(g.point_at(nlat)));
                op.face_w[i * op.faces + f] = a_face * inv_h2;
                op.nbr[i * op.faces + f] = g.compact[nlat];  // -1 on Dirichlet neighbors
                diag += a_face * inv_h2;
            }
        }
        op.diag[i] = diag;
    }
    return op;
}

EnergyGradient energy_and_gradient(const DiscreteOperator& op, const std::vector<double>& v,
                                   Exec exec) {
    const std::int64_t n = op.size();
    const double w = op.cell_volume;
    EnergyGradient out;
    std::vector<double> av(n);
    kernels::apply_stencil(op.stencil(), v.data(), av.data(), exec);
    const double quad = kernels::dot(av.data(), v.data(), n, exec);
    const double pnorm = kernels::weighted_p_sum(v.data(), op.Q.data(), op.p, n, exec);
    out.J = 0.5 * w * quad - (w / op.p) * pnorm;

    out.grad.resize(n);
    kernels::nonlinear_term(v.data(), op.Q.data(), op.p, out.grad.data(), n, exec);
    // grad = (A v - Q f(v)) * cell volume
    for (std::int64_t i = 0; i < n; ++i) out.grad[i] = w * (av[i] - out.grad[i]);
    // discrete L2 norm of the gradient field
    out.grad_norm = std::sqrt(w * kernels::dot(out.grad.data(), out.grad.data(), n, exec));
    out.residual_sup = kernels::sup_abs(out.grad.data(), n, exec);
    return out;
}

namespace {

// Conjugate gradients with Jacobi preconditioning for the (SPD) linear part.
// Runs a fixed iteration budget unless the relative tolerance is hit early.
int cg_solve(const DiscreteOperator& op, const std::vector<double>& b, std::vector<double>& x,
             double rel_tol, int max_it, Exec exec) {
    const std::int64_t n = op.size();
    std::vector<double> r(n), z(n), p(n), ap(n);
    x.assign(n, 0.0);
    r = b;
    const double b_norm = std::sqrt(kernels::dot(r.data(), r.data(), n, exec));
    if (b_norm == 0.0) return 0;
    for (std::int64_t i = 0; i < n; ++i) z[i] = r[i] / op.diag[i];
    p = z;
    double rz = kernels::dot(r.data(), z.data(), n, exec);
    int it = 0;
    for (; it < max_it; ++it) {
        kernels::apply_stencil(op.stencil(), p.data(), ap.data(), exec);
        const double pap = kernels::dot(p.data(), ap.data(), n, exec);
        if (pap <= 0.0) break;
        const double alpha = rz / pap;
        kernels::axpy(alpha, p.data(), x.data(), n, exec);
        kernels::axpy(-alpha, ap.data(), r.data(), n, exec);
        const double r_norm = std::sqrt(kernels::dot(r.data(), r.data(), n, exec));
        if (r_norm <= rel_tol * b_norm) {
            ++it;
            break;
        }
        for (std::int64_t i = 0; i < n; ++i) z[i] = r[i] / op.diag[i];
        const double rz_new = kernels::dot(r.data(), z.data(), n, exec);
        kernels::xpby(z.data(), rz_new / rz, p.data(), n, exec);
        rz = rz_new;
    }
    return it;
}

// MINRES (conjugate-residual recurrences) for the symmetric, possibly
// indefinite linearization B = A - (p-1) Q |v|^{p-2}.
template <typename ApplyB>
void minres_solve(ApplyB&& applyB, const std::vector<double>& b, std::vector<double>& x,
                  double rel_tol, int max_it, Exec exec) {
    const std::int64_t n = static_cast<std::int64_t>(b.size());
    x.assign(n, 0.0);
    std::vector<double> r = b, p0(n), p1(n), p2(n), s0(n), s1(n), s2(n);
    const double b_norm = std::sqrt(kernels::dot(r.data(), r.data(), n, exec));
    if (b_norm == 0.0) return;

    p0 = r;
    applyB(p0, s0);
    for (int k = 0; k < max_it; ++k) {
        std::swap(p2, p1);
        std::swap(s2, s1);
        std::swap(p1, p0);
        std::swap(s1, s0);

        const double s1s1 = kernels::dot(s1.data(), s1.data(), n, exec);
        if (s1s1 == 0.0) break;
        const double alpha = kernels::dot(r.data(), s1.data(), n, exec) / s1s1;
        kernels::axpy(alpha, p1.data(), x.data(), n, exec);
        kernels::axpy(-alpha, s1.data(), r.data(), n, exec);
        if (std::sqrt(kernels::dot(r.data(), r.data(), n, exec)) <= rel_tol * b_norm) break;

        p0 = s1;
        applyB(s1, s0);
        const double beta1 = kernels::dot(s0.data(), s1.data(), n, exec) / s1s1;
        kernels::axpy(-beta1, p1.data(), p0.data(), n, exec);
        kernels::axpy(-beta1, s1.data(), s0.data(), n, exec);
        if (k > 0) {
            const double s2s2 = kernels::dot(s2.data(), s2.data(), n, exec);
            if (s2s2 > 0.0) {
                const double beta2 = kernels::dot(s0.data(), s2.data(), n, exec) / s2s2;
                kernels::axpy(-beta2, p2.data(), p0.data(), n, exec);
                kernels::axpy(-beta2, s2.data(), s0.data(), n, exec);
            }
        }
    }
}

// Exact odd-reflection projector over paired inside nodes.
struct OddProjector {
    std::vector<std::int32_t> mirror;  // compact index of the mirrored node

    void project(std::vector<double>& v) const {
        for (std::int32_t i = 0; i < static_cast<std::int32_t>(v.size()); ++i) {
            const std::int32_t m = mirror[i];
            if (m > i) {
                const double a = 0.5 * (v[i] - v[m]);
                v[i] = a;
                v[m] = -a;
            } else if (m == i) {
                v[i] = 0.0;
            }
        }
    }
};

struct CoreResult {
    std::vector<double> values;
    double energy = 0.0, grad_norm = 0.0, residual_sup = 0.0;
    int iterations = 0;
    bool converged = false;
};

// J restricted to the ray through v, maximized over the scale: the path
// maximum along the mountain-pass normalization. Rescales v in place.
double retension_to_crest(const DiscreteOperator& op, std::vector<double>& v, Exec exec) {
    const std::int64_t n = op.size();
    const double w = op.cell_volume;
    std::vector<double> av(n);
    kernels::apply_stencil(op.stencil(), v.data(), av.data(), exec);
    const double quad = w * kernels::dot(av.data(), v.data(), n, exec);
    const double pnorm = w * kernels::weighted_p_sum(v.data(), op.Q.data(), op.p, n, exec);
    if (!(quad > 0.0) || !(pnorm > 0.0))
        throw std::runtime_error("mountain pass: degenerate field during re-tension");
    const double t = std::pow(quad / pnorm, 1.0 / (op.p - 2.0));
    kernels::scale(t, v.data(), n, exec);
    return (0.5 - 1.0 / op.p) * quad * t * t;  // J at the crest of the ray
}

// Mountain-pass search. A path from 0 past the energy well locates the crest;
// the crest point descends in the a-weighted metric with Armijo line search,
// re-tensioned after every step so the iterate stays the maximum of its ray
// (which is what stops the path from sliding down to zero), and finishes with
// curvature-corrected steps near the critical point.
CoreResult solve_core(const DiscreteOperator& op, const SolveOptions& opts,
                      const OddProjector* odd, const std::vector<double>* warm_start,
                      const std::vector<double>& seed_rhs) {
    const std::int64_t n = op.size();
    const double w = op.cell_volume;
    const double tol = opts.tol_factor * w;
    const Exec exec = opts.exec;
    const int S = std::max(opts.path_segments, 8);

    // Base bump: smooth positive (or odd) profile from one linear solve.
    std::vector<double> e(n);
    cg_solve(op, seed_rhs, e, 1e-12, 20000, exec);
    if (odd) odd->project(e);
    {
        Rng rng(opts.seed);
        const double amp = 1e-6 * kernels::sup_abs(e.data(), n, exec);
        for (std::int64_t i = 0; i < n; ++i) e[i] += amp * rng.uniform(-1.0, 1.0);
        if (odd) odd->project(e);
    }
    if (warm_start) e = *warm_start;
    const double e_sup = kernels::sup_abs(e.data(), n, exec);
    if (e_sup == 0.0) throw ConfigError("mountain pass: seed profile vanished");
    kernels::scale(1.0 / e_sup, e.data(), n, exec);

    std::vector<double> ae(n);
    kernels::apply_stencil(op.stencil(), e.data(), ae.data(), exec);
    const double quad = w * kernels::dot(ae.data(), e.data(), n, exec);
    const double pnorm = w * kernels::weighted_p_sum(e.data(), op.Q.data(), op.p, n, exec);
    const double t_zero = std::pow(op.p * quad / (2.0 * pnorm), 1.0 / (op.p - 2.0));
    const double t_end = 1.25 * t_zero;

    // Locate the path maximum over the segment endpoints.
    auto path_energy = [&](double t) {
        return 0.5 * t * t * quad - std::pow(t, op.p) / op.p * pnorm;
    };
    double t_max = 0.0, j_max = -kInf;
    for (int j = 1; j < S; ++j) {
        const double t = t_end * j / S;
        if (path_energy(t) > j_max) {
            j_max = path_energy(t);
            t_max = t;
        }
    }
    std::vector<double> v = e;
    kernels::scale(t_max, v.data(), n, exec);

    CoreResult out;
    const auto is_converged = [tol](const EnergyGradient& eg) {
        return eg.grad_norm <= tol && eg.residual_sup <= 5.0 * tol;
    };
    double newton_gate = 0.0;
    double last_crest = kInf;
    int stall_count = 0;
    std::vector<double> d(n), trial(n), r(n);
    int it = 0;
    for (; it < opts.max_outer; ++it) {
        double crest_J = retension_to_crest(op, v, exec);
        EnergyGradient eg = energy_and_gradient(op, v, exec);
        if (it == 0) newton_gate = 1e-3 * eg.grad_norm;
        if (opts.verbose)
            std::fprintf(stderr, "  [mp] it=%d J=%.8g gn=%.3g rsup=%.3g gate=%.3g\n", it, eg.J,
                         eg.grad_norm, eg.residual_sup, newton_gate);

        if (is_converged(eg)) {
            out.values = std::move(v);
            out.energy = eg.J;
            out.grad_norm = eg.grad_norm;
            out.residual_sup = eg.residual_sup;
            out.converged = true;
            break;
        }

        const bool descent_stalled = stall_count >= 5;
        if (eg.grad_norm <= newton_gate || descent_stalled) {
            stall_count = 0;
            // Damped Newton on the symmetric linearization, regularized by an
            // adaptive Levenberg shift; a step is rejected when the residual
            // fails to drop or the Nehari scale of the trial drifts, which
            // guards against sliding down to the zero solution.
            std::vector<double> vn = v;
            EnergyGradient cur = eg;
            int rejected = 0;
            const double newton_entry = cur.grad_norm;
            const double mu_unit = 1e-4 * op.diag[n / 2];
            double mu = 0.0;
            std::vector<double> diag_nl(n);
            std::vector<double> jac_scale(n);
            int newton_total = 0;
            while (!is_converged(cur) && rejected < 6 && newton_total++ < 60) {
                std::vector<double> rhs(n);
                kernels::nonlinear_term(vn.data(), op.Q.data(), op.p, diag_nl.data(), n, exec);
                for (std::int64_t i = 0; i < n; ++i)
                    diag_nl[i] = vn[i] != 0.0 ? (op.p - 1.0) * diag_nl[i] / vn[i] - mu : -mu;
                // symmetric Jacobi scaling keeps the Krylov solve h-robust
                for (std::int64_t i = 0; i < n; ++i) {
                    const double db = std::abs(op.diag[i] - diag_nl[i]);
                    jac_scale[i] = 1.0 / std::sqrt(std::max(db, 1e-8 * op.diag[i]));
                }
                for (std::int64_t i = 0; i < n; ++i)
                    rhs[i] = -cur.grad[i] / w * jac_scale[i];
                std::vector<double> tmp(n);
                auto applyB = [&](const std::vector<double>& x, std::vector<double>& y) {
                    for (std::int64_t i = 0; i < n; ++i) tmp[i] = jac_scale[i] * x[i];
                    kernels::apply_stencil(op.stencil(), tmp.data(), y.data(), exec);
                    for (std::int64_t i = 0; i < n; ++i)
                        y[i] = jac_scale[i] * (y[i] - diag_nl[i] * tmp[i]);
                };
                // inexact solves: loose far out, tight near the root
                const double forcing =
                    std::clamp(std::sqrt(cur.grad_norm / newton_entry) * 1e-2, 1e-12, 1e-2);
                minres_solve(applyB, rhs, d, forcing, 3000, exec);
                for (std::int64_t i = 0; i < n; ++i) d[i] *= jac_scale[i];
                if (odd) odd->project(d);

                bool improved = false;
                double step = 1.0;
                for (int ls = 0; ls < 6; ++ls, step *= 0.25) {
                    trial = vn;
                    kernels::axpy(step, d.data(), trial.data(), n, exec);
                    EnergyGradient t_eg = energy_and_gradient(op, trial, exec);
                    if (t_eg.grad_norm < (1.0 - 1e-4 * step) * cur.grad_norm) {
                        // Nehari scale drift guard
                        std::vector<double> probe = trial;
                        retension_to_crest(op, probe, exec);
                        const double drift =
                            kernels::sup_abs(probe.data(), n, exec) /
                            std::max(kernels::sup_abs(trial.data(), n, exec), 1e-300);
                        if (drift > 0.3 && drift < 3.0) {
                            vn = std::move(trial);
                            cur = std::move(t_eg);
                            improved = true;
                            break;
                        }
                    }
                }
                if (improved) {
                    mu = mu > mu_unit ? mu / 3.0 : 0.0;
                    rejected = 0;
                } else {
                    mu = std::max(10.0 * mu, mu_unit);
                    ++rejected;
                }
            }
            if (is_converged(cur)) {
                out.values = std::move(vn);
                out.energy = cur.J;
                out.grad_norm = cur.grad_norm;
                out.residual_sup = cur.residual_sup;
                out.converged = true;
                ++it;
                break;
            }
            if (cur.grad_norm < 0.5 * eg.grad_norm) {
                v = std::move(vn);  // keep partial Newton progress
                continue;
            }
            newton_gate = std::min(newton_gate, eg.grad_norm / 10.0);
        }

        // Approximate Riesz gradient: a bounded CG budget on A d = -r keeps
        // the direction mesh-robust without an exact inner solve.
        const int riesz_budget =
            std::max({48, op.grid->extents[0], op.grid->extents[1], op.grid->extents[2]});
        for (std::int64_t i = 0; i < n; ++i) r[i] = -eg.grad[i] / w;
        cg_solve(op, r, d, 1e-10, riesz_budget, exec);
        if (odd) odd->project(d);
        double slope = kernels::dot(eg.grad.data(), d.data(), n, exec);
        if (slope >= 0.0) {  // fall back to the plain gradient
            for (std::int64_t i = 0; i < n; ++i) d[i] = r[i];
            slope = kernels::dot(eg.grad.data(), d.data(), n, exec);
        }
        // Armijo on the crest energy of the stepped ray.
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
            trial = v;
            kernels::axpy(step, d.data(), trial.data(), n, exec);
            std::vector<double> probe = trial;
            const double J_new = retension_to_crest(op, probe, exec);
            if (J_new <= crest_J + 0.25 * step * slope) {
                v = std::move(probe);
                accepted = true;
                break;
            }
        }
        if (!accepted) newton_gate = std::max(newton_gate, eg.grad_norm * 1.0001);
        if (last_crest - crest_J <= 1e-9 * std::abs(crest_J)) ++stall_count;
        else stall_count = 0;
        last_crest = crest_J;
    }
    out.iterations = it;
    if (!out.converged) {
        out.values = std::move(v);
        EnergyGradient eg = energy_and_gradient(op, out.values, exec);
        out.energy = eg.J;
        out.grad_norm = eg.grad_norm;
        out.residual_sup = eg.residual_sup;
    }
    return out;
}

void check_solve_preconditions(const reduction::WeightedEllipticProblem& problem) {
    if (problem.p <= 2.0 + 1e-3)
        throw std::invalid_argument(
            "solver: exponents this close to 2 lose the mountain-pass geometry");
    if (problem.d == 3 && problem.p >= reduction::critical_exponent(3, 0))
        throw std::invalid_argument("solver: exponent at or above the 3-D compactness threshold");
    if (problem.d != 2 && problem.d != 3)
        throw std::invalid_argument("solver: only 2-D and 3-D reduced problems are discretized");
}

SolveReport make_report(std::shared_ptr<const MaskedGrid> grid, CoreResult&& core, double p) {
    SolveReport rep;
    rep.field.grid = std::move(grid);
    rep.field.values = std::move(core.values);
    rep.energy = core.energy;
    rep.gradient_norm = core.grad_norm;
    rep.residual_sup = core.residual_sup;
    rep.iterations = core.iterations;
    rep.converged = core.converged;
    rep.p = p;
    return rep;
}

}  // namespace

SolveReport mountain_pass_solve(const reduction::WeightedEllipticProblem& problem,
                                std::shared_ptr<const MaskedGrid> grid,
                                const SolveOptions& options) {
    check_solve_preconditions(problem);
    DiscreteOperator op = assemble(problem, grid);
    std::vector<double> ones(op.size(), 1.0);
    CoreResult core = solve_core(op, options, nullptr, nullptr, ones);
    if (core.converged) {
        double mn = 0.0;
        for (double v : core.values) mn = std::min(mn, v);
        const double sup = kernels::sup_abs(core.values.data(), op.size(), options.exec);
        if (mn < -1e-8 * sup) core.converged = false;  // not the positive branch
    }
    return make_report(std::move(grid), std::move(core), problem.p);
}

SolveReport mountain_pass_solve(const reduction::WeightedEllipticProblem& problem,
                                const SolveOptions& options) {
    auto grid = std::make_shared<MaskedGrid>(build_grid(problem.domain, options.h));
    return mountain_pass_solve(problem, std::move(grid), options);
}

SolveReport sign_changing_solve(const reduction::WeightedEllipticProblem& problem,
                                int reflect_axis, const SolveOptions& options) {
    check_solve_preconditions(problem);
    if (reflect_axis < 0 || reflect_axis >= problem.d)
        throw ConfigError("sign_changing_solve: reflection axis out of range");
    auto grid =
        std::make_shared<MaskedGrid>(build_grid(problem.domain, options.h, 2, reflect_axis));

    // Mask and coefficients must be invariant under the reflection.
    OddProjector odd;
    odd.mirror.resize(grid->inside_count());
    for (std::int64_t i = 0; i < grid->inside_count(); ++i) {
        const std::int64_t mlat = grid->mirror_lattice(grid->nodes[i], reflect_axis);
        const std::int32_t m = grid->compact[mlat];
        if (m < 0) throw ConfigError("sign_changing_solve: domain is not reflection-symmetric");
        odd.mirror[i] = m;
    }
    DiscreteOperator op = assemble(problem, grid);
    for (std::int64_t i = 0; i < grid->inside_count(); ++i) {
        const std::int32_t m = odd.mirror[i];
        const bool sym = std::abs(op.Q[i] - op.Q[m]) <= 1e-12 * (1.0 + std::abs(op.Q[i])) &&
                         std::abs(op.diag[i] - op.diag[m]) <= 1e-12 * (1.0 + std::abs(op.diag[i]));
        if (!sym)
            throw ConfigError("sign_changing_solve: coefficients are not reflection-symmetric");
    }

    // Odd seed: positive source on one side, negative on the other.
    std::vector<double> seed(grid->inside_count());
    const double center =
        grid->origin[reflect_axis] + 0.5 * (grid->extents[reflect_axis] - 1) * grid->h;
    for (std::int64_t i = 0; i < grid->inside_count(); ++i) {
        const double x = grid->point_at(grid->nodes[i])[reflect_axis];
        seed[i] = x > center ? 1.0 : (x < center ? -1.0 : 0.0);
    }
    CoreResult core = solve_core(op, options, &odd, nullptr, seed);
    if (!core.values.empty()) odd.project(core.values);
    return make_report(std::move(grid), std::move(core), problem.p);
}

int nodal_domain_count(const Field& field, double rel_threshold) {
    const MaskedGrid& g = *field.grid;
    const double thr = rel_threshold * field.sup_abs();
    const std::int64_t n = g.inside_count();
    std::vector<int> label(n, 0);  // 0 unvisited/dead, 1 visited
    int count = 0;
    std::deque<std::int64_t> queue;
    for (std::int64_t start = 0; start < n; ++start) {
        if (label[start] || std::abs(field.values[start]) <= thr) continue;
        const int sign = field.values[start] > 0 ? 1 : -1;
        ++count;
        label[start] = 1;
        queue.push_back(start);
        while (!queue.empty()) {
            const std::int64_t i = queue.front();
            queue.pop_front();
            const auto c = g.lattice_coords(g.nodes[i]);
            for (int axis = 0; axis < g.dim; ++axis)
                for (int dir = -1; dir <= 1; dir += 2) {
                    auto cc = c;
                    cc[axis] += dir;
                    const std::int32_t nb = g.compact[g.lattice_index(cc[0], cc[1], cc[2])];
                    if (nb < 0 || label[nb]) continue;
                    if (std::abs(field.values[nb]) <= thr) continue;
                    if ((field.values[nb] > 0 ? 1 : -1) != sign) continue;
                    label[nb] = 1;
                    queue.push_back(nb);
                }
        }
    }
    return count;
}

namespace {

struct RadialState {
    double v, vp;
};

RadialState rk4_step(int d, double p, double r, RadialState s, double dr) {
    auto f = [d, p](double rr, const RadialState& st) -> RadialState {
        const double nonlinear = std::pow(std::abs(st.v), p - 2.0) * st.v;
        double acc;
        if (rr < 1e-14) acc = -nonlinear / d;
        else acc = -nonlinear - (d - 1) / rr * st.vp;
        return {st.vp, acc};
    };
    const RadialState k1 = f(r, s);
    const RadialState k2 = f(r + 0.5 * dr, {s.v + 0.5 * dr * k1.v, s.vp + 0.5 * dr * k1.vp});
    const RadialState k3 = f(r + 0.5 * dr, {s.v + 0.5 * dr * k2.v, s.vp + 0.5 * dr * k2.vp});
    const RadialState k4 = f(r + dr, {s.v + dr * k3.v, s.vp + dr * k3.vp});
    return {s.v + dr / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
            s.vp + dr / 6.0 * (k1.vp + 2.0 * k2.vp + 2.0 * k3.vp + k4.vp)};
}

struct RadialRun {
    double first_zero = kInf;  // radius of the first sign change
    double value_at_end = 0.0;
    std::vector<std::pair<double, double>> samples;
};

RadialRun integrate_radial(int d, double p, double center_value, double r_max,
                           bool keep_samples) {
    const double spike = std::pow(center_value, -(p - 2.0) / 2.0);
    const double dr = std::min(1e-4, spike / 40.0);
    const std::int64_t steps = static_cast<std::int64_t>(std::ceil(r_max / dr));
    const std::int64_t stride = std::max<std::int64_t>(1, steps / 512);

    RadialRun run;
    RadialState s{center_value, 0.0};
    double r = 0.0;
    if (keep_samples) run.samples.push_back({0.0, s.v});
    for (std::int64_t i = 0; i < steps; ++i) {
        const double step = std::min(dr, r_max - r);
        const RadialState next = rk4_step(d, p, r, s, step);
        if (next.v <= 0.0) {
            // linear interpolation to the crossing
            const double frac = s.v / (s.v - next.v);
            run.first_zero = r + frac * step;
            run.value_at_end = next.v;
            return run;
        }
        s = next;
        r += step;
        if (keep_samples && (i % stride == 0)) run.samples.push_back({r, s.v});
    }
    run.value_at_end = s.v;
    if (keep_samples) run.samples.push_back({r, s.v});
    return run;
}

}  // namespace

double radial_first_zero(int d, double p, double center_value, double r_max) {
    return integrate_radial(d, p, center_value, r_max, false).first_zero;
}

ShootResult shoot_radial(int d, double p, double tol) {
    if (d < 2) throw std::invalid_argument("shoot_radial: dimension must be >= 2");
    if (p <= 2.0) throw std::invalid_argument("shoot_radial: exponent must exceed 2");
    if (tol <= 0.0) throw std::invalid_argument("shoot_radial: tolerance must be positive");
    if (d > 2) {
        const double pc = 2.0 * d / (d - 2.0);
        if (p >= pc)
            throw std::domain_error(
                "shoot_radial: no positive solution on the ball at or above the critical "
                "exponent");
    }

    // Bracket by doubling: small center values undershoot (v(1) > 0).
    double lo = 1e-3;
    if (!(integrate_radial(d, p, lo, 1.0, false).first_zero > 1.0))
        throw std::runtime_error("shoot_radial: lower bracket unexpectedly overshoots");
    double hi = 1.0;
    int guard = 0;
    while (integrate_radial(d, p, hi, 1.0, false).first_zero > 1.0) {
        hi *= 2.0;
        if (++guard > 60) throw std::runtime_error("shoot_radial: no overshoot found");
    }

    double miss = kInf;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const RadialRun run = integrate_radial(d, p, mid, 1.0, false);
        if (run.first_zero <= 1.0) hi = mid;
        else {
            lo = mid;
            miss = run.value_at_end;
        }
        if (miss <= tol && it > 20) break;
        if ((hi - lo) / hi < 1e-15) break;
    }
    if (!(miss <= tol))
        throw std::runtime_error("shoot_radial: bisection stalled above the miss tolerance");

    RadialRun final_run = integrate_radial(d, p, lo, 1.0, true);
    ShootResult res;
    res.center_value = lo;
    res.boundary_miss = std::abs(final_run.value_at_end);
    res.profile = std::move(final_run.samples);
    return res;
}

std::vector<SolveReport> continuation_in_p(const reduction::WeightedEllipticProblem& problem,
                                           const std::vector<double>& p_list,
                                           const SolveOptions& options) {
    if (p_list.empty()) throw std::invalid_argument("continuation_in_p: empty exponent list");
    for (std::size_t i = 1; i < p_list.size(); ++i)
        if (p_list[i] <= p_list[i - 1])
            throw std::invalid_argument("continuation_in_p: exponents must strictly increase");

    auto grid = std::make_shared<MaskedGrid>(build_grid(problem.domain, options.h));
    std::vector<SolveReport> reports;
    std::vector<double> warm;
    for (double p : p_list) {
        reduction::WeightedEllipticProblem prob = problem;
        prob.p = p;
        check_solve_preconditions(prob);
        DiscreteOperator op = assemble(prob, grid);
        std::vector<double> ones(op.size(), 1.0);
        CoreResult core =
            solve_core(op, options, nullptr, warm.empty() ? nullptr : &warm, ones);
        if (core.converged) warm = core.values;
        reports.push_back(make_report(grid, std::move(core), p));
    }
    return reports;
}

}  // namespace supercrit::solver

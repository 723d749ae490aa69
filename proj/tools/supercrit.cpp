#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "supercrit/certify.hpp"
#include "supercrit/io.hpp"
#include "supercrit/kernels.hpp"
#include "supercrit/reduction.hpp"
#include "supercrit/solver.hpp"

namespace fs = std::filesystem;
using namespace supercrit;
using io::json;

namespace {

struct Overrides {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> h;
    std::optional<double> p;
};

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) config_fail("config: expected an object at " + path);
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) config_fail("config: unknown key '" + path + "/" + key + "'");
    }
}

template <typename T>
T require(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) config_fail("config: missing key '" + path + "/" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        config_fail("config: bad value at '" + path + "/" + key + "': " + e.what());
    }
}

geometry::ProfileDomain parse_profile(const json& j, const std::string& path) {
    check_keys(j, path, {"kind", "parameters"});
    const auto kind = require<std::string>(j, path, "kind");
    if (!j.contains("parameters")) config_fail("config: missing '" + path + "/parameters'");
    return geometry::make_profile(kind, j.at("parameters"));
}

geometry::Scalar parse_coefficient_K(const json& j, const std::string& path) {
    check_keys(j, path, {"mode", "value"});
    const auto mode = require<std::string>(j, path, "mode");
    if (mode == "constant") {
        const double value = j.value("value", 1.0);
        if (!(value > 0.0)) config_fail("config: coefficient value must be positive at " + path);
        return [value](const Point&) { return value; };
    }
    config_fail("config: unsupported coefficient mode '" + mode + "' at " + path);
}

void write_resolved(const fs::path& out, const json& resolved) {
    io::write_json(out / "resolved_config.json", resolved);
}

fs::path prepare_out(const Overrides& ov) {
    fs::path out(ov.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) config_fail("cannot create output directory " + out.string());
    return out;
}

// ---------------------------------------------------------------- commands

int cmd_verify_algebra(const json& cfg, const Overrides& ov) {
    check_keys(cfg, "", {"samples", "h", "seed"});
    const int samples = cfg.value("samples", 10000);
    const double h = ov.h.value_or(cfg.value("h", 1e-3));
    const std::uint64_t seed = ov.seed.value_or(cfg.value("seed", 42));
    if (samples < 1 || h <= 0.0) config_fail("verify-algebra: samples and h must be positive");

    const fs::path out = prepare_out(ov);
    json resolved = {{"command", "verify-algebra"}, {"samples", samples}, {"h", h}, {"seed", seed}};
    write_resolved(out, resolved);

    const algebra::DilationModel model = algebra::DilationModel::calibrated(h);
    Rng rng(seed);
    json report;
    report["dilation_constant"] = model.c_star;
    bool all_ok = true;
    for (int dim : {1, 2, 4, 8}) {
        double worst_mult = 0.0, worst_hopf = 0.0;
        for (int i = 0; i < samples; ++i) {
            auto a = algebra::AlgebraElement::zero(dim);
            auto b = algebra::AlgebraElement::zero(dim);
            for (int q = 0; q < dim; ++q) {
                a.c[q] = rng.normal();
                b.c[q] = rng.normal();
            }
            const double nm = std::abs(algebra::mul(a, b).norm() - a.norm() * b.norm()) /
                              (a.norm() * b.norm());
            worst_mult = std::max(worst_mult, nm);
            const algebra::HopfPoint pt(a, b);
            const double nh =
                std::abs(norm(algebra::hopf_map(pt)) - pt.norm_sq()) / pt.norm_sq();
            worst_hopf = std::max(worst_hopf, nh);
        }
        const bool ok = worst_mult <= 1e-12 && worst_hopf <= 1e-12;
        all_ok = all_ok && ok;
        report["dim_" + std::to_string(dim)] = {{"norm_multiplicativity_worst", worst_mult},
                                                {"hopf_norm_identity_worst", worst_hopf},
                                                {"pass", ok}};
    }
    io::write_json(out / "algebra_report.json", report);
    return all_ok ? 0 : 2;
}

int cmd_reduce(const json& cfg, const Overrides& ov) {
    check_keys(cfg, "",
               {"mode", "profile", "p", "a", "c_star", "multiplicities", "ambient_dim", "K",
                "orbit", "energies"});
    const auto mode = require<std::string>(cfg, "", "mode");
    const double p = ov.p.value_or(require<double>(cfg, "", "p"));
    geometry::ProfileDomain profile = parse_profile(cfg.at("profile"), "profile");

    const fs::path out = prepare_out(ov);
    json resolved = cfg;
    resolved["command"] = "reduce";
    resolved["p"] = p;

    reduction::WeightedEllipticProblem prob;
    json info;
    if (mode == "hopf") {
        const double a = cfg.value("a", 0.0);
        algebra::DilationModel model;
        if (cfg.contains("c_star")) model.c_star = cfg.at("c_star").get<double>();
        else model = algebra::DilationModel::calibrated();
        resolved["a"] = a;
        resolved["c_star"] = model.c_star;
        prob = reduction::hopf_reduce(profile, a, p, model);
        const int dim_k = profile.dimension - 1;
        info["ambient_dim"] = 2 * dim_k;  // N = 2 dim K
        info["k"] = dim_k - 1;
        info["critical_exponent"] = reduction::critical_exponent(2 * dim_k, dim_k - 1);
    } else if (mode == "rotational") {
        reduction::RotationalSpec spec;
        spec.multiplicities = require<std::vector<int>>(cfg, "", "multiplicities");
        spec.ambient_dim = require<int>(cfg, "", "ambient_dim");
        spec.profile = profile;
        spec.K = cfg.contains("K") ? parse_coefficient_K(cfg.at("K"), "K")
                                   : geometry::Scalar([](const Point&) { return 1.0; });
        prob = reduction::symmetry_reduce(spec, p);
        info["critical_exponent"] =
            reduction::critical_exponent(spec.ambient_dim, spec.total_multiplicity());
        info["ambient_dim"] = spec.ambient_dim;
        info["k"] = spec.total_multiplicity();
    } else {
        config_fail("reduce: mode must be 'hopf' or 'rotational'");
    }

    info["description"] = prob.description;
    info["d"] = prob.d;
    info["p"] = prob.p;
    {
        // coefficient samples along the first axis of the bounding box
        json samples = json::array();
        for (int i = 1; i <= 4; ++i) {
            Point x = profile.box_lo;
            for (int q = 0; q < profile.dimension; ++q)
                x[q] += (profile.box_hi[q] - profile.box_lo[q]) * i / 5.0;
            samples.push_back({{"point", x},
                               {"a", prob.weight_a(x)},
                               {"Q", prob.coeff_Q(x)},
                               {"c0", prob.linear_c0(x)}});
        }
        info["coefficient_samples"] = std::move(samples);
    }

    if (cfg.contains("orbit")) {
        const json& jo = cfg.at("orbit");
        check_keys(jo, "orbit", {"min_orbit_weight", "sobolev_constant", "dimension"});
        reduction::OrbitData orbit;
        if (jo.at("min_orbit_weight").is_string()) {
            if (jo.at("min_orbit_weight").get<std::string>() != "inf")
                config_fail("reduce: min_orbit_weight must be a number or \"inf\"");
            orbit.min_orbit_weight = kInf;
        } else {
            orbit.min_orbit_weight = jo.at("min_orbit_weight").get<double>();
        }
        orbit.sobolev_constant = jo.value("sobolev_constant", 1.0);
        orbit.dimension = require<int>(jo, "orbit", "dimension");
        const double threshold = reduction::ps_threshold(orbit);
        info["ps_threshold"] = is_inf(threshold) ? json("+inf") : json(threshold);
        if (cfg.contains("energies")) {
            const auto energies = cfg.at("energies").get<std::vector<double>>();
            const auto lb = reduction::level_bound(energies, orbit);
            info["level_bound"] = {{"c_upper", lb.c_upper}, {"ell_upper", lb.ell_upper}};
        }
    }

    write_resolved(out, resolved);
    io::write_json(out / "reduced_problem.json", info);
    return 0;
}

reduction::WeightedEllipticProblem parse_solve_problem(const json& cfg, double p,
                                                       geometry::ProfileDomain profile,
                                                       json& resolved) {
    const json& jc = cfg.at("coefficients");
    check_keys(jc, "coefficients",
               {"mode", "a", "c_star", "multiplicities", "ambient_dim", "K"});
    const auto mode = require<std::string>(jc, "coefficients", "mode");
    if (mode == "unit") {
        reduction::WeightedEllipticProblem prob;
        prob.d = profile.dimension;
        prob.domain = std::move(profile);
        prob.weight_a = [](const Point&) { return 1.0; };
        prob.coeff_Q = [](const Point&) { return 1.0; };
        prob.linear_c0 = [](const Point&) { return 0.0; };
        prob.p = p;
        prob.description = "unit coefficients";
        return prob;
    }
    if (mode == "hopf") {
        const double a = jc.value("a", 0.0);
        algebra::DilationModel model;
        if (jc.contains("c_star")) model.c_star = jc.at("c_star").get<double>();
        else model = algebra::DilationModel::calibrated();
        resolved["coefficients"]["a"] = a;
        resolved["coefficients"]["c_star"] = model.c_star;
        return reduction::hopf_reduce(profile, a, p, model);
    }
    if (mode == "rotational") {
        reduction::RotationalSpec spec;
        spec.multiplicities = require<std::vector<int>>(jc, "coefficients", "multiplicities");
        spec.ambient_dim = require<int>(jc, "coefficients", "ambient_dim");
        spec.profile = std::move(profile);
        spec.K = jc.contains("K") ? parse_coefficient_K(jc.at("K"), "coefficients/K")
                                  : geometry::Scalar([](const Point&) { return 1.0; });
        return reduction::symmetry_reduce(spec, p);
    }
    config_fail("solve: coefficients mode must be 'unit', 'hopf' or 'rotational'");
}

int cmd_solve(const json& cfg, const Overrides& ov) {
    check_keys(cfg, "",
               {"profile", "coefficients", "p", "h", "sign_changing", "reflect_axis",
                "tol_factor", "max_outer", "path_segments", "seed"});
    const double p = ov.p.value_or(require<double>(cfg, "", "p"));
    const double h = ov.h.value_or(require<double>(cfg, "", "h"));
    geometry::ProfileDomain profile = parse_profile(cfg.at("profile"), "profile");
    if (!cfg.contains("coefficients")) config_fail("solve: missing 'coefficients'");

    solver::SolveOptions opts;
    opts.h = h;
    opts.tol_factor = cfg.value("tol_factor", 1e-8);
    opts.max_outer = cfg.value("max_outer", 4000);
    opts.path_segments = cfg.value("path_segments", 64);
    opts.seed = ov.seed.value_or(cfg.value("seed", 0));
    const bool sign_changing = cfg.value("sign_changing", false);
    const int reflect_axis = cfg.value("reflect_axis", 0);

    const fs::path out = prepare_out(ov);
    json resolved = cfg;
    resolved["command"] = "solve";
    resolved["p"] = p;
    resolved["h"] = h;
    resolved["seed"] = opts.seed;
    resolved["tol_factor"] = opts.tol_factor;
    resolved["max_outer"] = opts.max_outer;
    resolved["path_segments"] = opts.path_segments;
    resolved["sign_changing"] = sign_changing;

    const reduction::WeightedEllipticProblem prob =
        parse_solve_problem(resolved, p, std::move(profile), resolved);
    const solver::SolveReport rep = sign_changing
                                        ? solver::sign_changing_solve(prob, reflect_axis, opts)
                                        : solver::mountain_pass_solve(prob, opts);

    write_resolved(out, resolved);
    json report = io::report_to_json(rep);
    report["grid"] = io::grid_to_json(*rep.field.grid);
    report["config"] = resolved;
    io::write_json(out / "solve_report.json", report);
    io::save_field_csv(out / "field.csv", rep.field);
    io::save_field_pgm(out / "field.pgm", rep.field);
    return rep.converged ? 0 : 3;
}

int cmd_certify(const json& cfg, const Overrides& ov) {
    check_keys(cfg, "",
               {"theorem", "profile", "multiplicities", "ambient_dim", "K", "p", "t0", "t1",
                "taus", "epsilon", "n", "c_star"});
    const auto theorem = require<std::string>(cfg, "", "theorem");
    const double p = ov.p.value_or(require<double>(cfg, "", "p"));

    const fs::path out = prepare_out(ov);
    json resolved = cfg;
    resolved["command"] = "certify";
    resolved["p"] = p;
    write_resolved(out, resolved);

    certify::Certificate cert;
    if (theorem == "rotational") {
        reduction::RotationalSpec spec;
        spec.multiplicities = require<std::vector<int>>(cfg, "", "multiplicities");
        spec.ambient_dim = require<int>(cfg, "", "ambient_dim");
        spec.profile = parse_profile(cfg.at("profile"), "profile");
        spec.K = cfg.contains("K") ? parse_coefficient_K(cfg.at("K"), "K")
                                   : geometry::Scalar([](const Point&) { return 1.0; });
        spec.gradK = [](const Point& x) { return Point(x.size(), 0.0); };
        if (cfg.contains("K") && cfg.at("K").value("mode", "constant") != "constant")
            config_fail("certify: only constant K is available from the command line");
        cert = certify::certify_theorem1(spec, p, require<double>(cfg, "", "t0"),
                                         require<double>(cfg, "", "t1"));
    } else if (theorem == "product") {
        const auto result = certify::certify_theorem4(
            require<std::vector<int>>(cfg, "", "multiplicities"),
            require<std::vector<double>>(cfg, "", "taus"), require<double>(cfg, "", "epsilon"),
            p, require<int>(cfg, "", "ambient_dim"));
        io::write_json(out / "constructed_profile.json", io::profile_to_json(result.theta));
        cert = result.certificate;
    } else if (theorem == "hopf") {
        algebra::DilationModel model;
        if (cfg.contains("c_star")) model.c_star = cfg.at("c_star").get<double>();
        else model = algebra::DilationModel::calibrated();
        cert = certify::certify_hopf(parse_profile(cfg.at("profile"), "profile"),
                                     require<int>(cfg, "", "n"), p, model);
    } else {
        config_fail("certify: theorem must be 'rotational', 'product' or 'hopf'");
    }

    io::write_json(out / "certificate.json", cert.to_json());
    return 0;
}

int cmd_lift(const json& cfg, const Overrides& ov) {
    check_keys(cfg, "", {"from", "c_star", "points", "fd_step", "seed"});
    const auto from = fs::path(require<std::string>(cfg, "", "from"));
    const int points = cfg.value("points", 100);
    const std::uint64_t seed = ov.seed.value_or(cfg.value("seed", 42));

    const json report = io::read_json(from / "solve_report.json");
    const io::LoadedField loaded = io::load_field(report.at("grid"), from / "field.csv");
    const solver::Field& field = loaded.field;

    algebra::DilationModel model;
    if (cfg.contains("c_star")) model.c_star = cfg.at("c_star").get<double>();
    else model = algebra::DilationModel::calibrated();
    const double fd_step = ov.h.value_or(cfg.value("fd_step", field.grid->h / 4.0));

    const fs::path out = prepare_out(ov);
    json resolved = cfg;
    resolved["command"] = "lift";
    resolved["c_star"] = model.c_star;
    resolved["points"] = points;
    resolved["fd_step"] = fd_step;
    resolved["seed"] = seed;
    write_resolved(out, resolved);

    const reduction::LiftedField u = reduction::lift(field, model);
    const int kdim = u.algebra_dim();
    const int zdim = 2 * kdim;

    // sample lifted values at random points whose image stays interior
    Rng rng(seed);
    const auto& g = *field.grid;
    double lo = kInf, hi = 0.0;
    for (std::int64_t i = 0; i < g.inside_count(); ++i) {
        const double r = norm(g.point_at(g.nodes[i]));
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    std::ofstream csv(out / "lifted_samples.csv");
    if (!csv) config_fail("cannot write lifted samples");
    csv << "z0";
    for (int q = 1; q < zdim; ++q) csv << ",z" << q;
    csv << ",value\n";
    int kept = 0;
    long tries = 0;
    double sup = 0.0;
    while (kept < points && ++tries < 100000L * points) {
        const Point dir = rng.unit_vector(zdim);
        const double r = std::sqrt(rng.uniform(lo * 1.05, hi * 0.95));
        Point z(zdim);
        for (int q = 0; q < zdim; ++q) z[q] = r * dir[q];
        double value;
        try {
            value = u(z);
        } catch (const std::domain_error&) {
            continue;
        }
        ++kept;
        sup = std::max(sup, std::abs(value));
        for (int q = 0; q < zdim; ++q) csv << (q ? "," : "") << z[q];
        csv << ',' << value << '\n';
    }
    json lift_report = {{"points", kept},
                        {"sup_sampled", sup},
                        {"algebra_dim", kdim},
                        {"fd_step", fd_step},
                        {"source_p", report.at("p")}};
    io::write_json(out / "lift_report.json", lift_report);
    return 0;
}

int cmd_oracle(const json& cfg, const Overrides& ov) {
    check_keys(cfg, "", {"d", "p", "tol"});
    const int d = require<int>(cfg, "", "d");
    const double p = ov.p.value_or(require<double>(cfg, "", "p"));
    const double tol = cfg.value("tol", 1e-10);

    const fs::path out = prepare_out(ov);
    json resolved = {{"command", "oracle"}, {"d", d}, {"p", p}, {"tol", tol}};
    write_resolved(out, resolved);

    const solver::ShootResult shot = solver::shoot_radial(d, p, tol);
    io::write_json(out / "oracle.json", {{"d", d},
                                         {"p", p},
                                         {"center_value", shot.center_value},
                                         {"boundary_miss", shot.boundary_miss}});
    std::ofstream csv(out / "radial_profile.csv");
    if (!csv) config_fail("cannot write radial profile");
    csv << "r,value\n";
    for (const auto& [r, v] : shot.profile) csv << r << ',' << v << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("SUPERCRIT_THREADS"))
        kernels::set_threads(std::atoi(threads));

    CLI::App app{"numerical laboratory for supercritical elliptic problems"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");

    Overrides ov;
    std::string command;
    for (const char* name :
         {"verify-algebra", "reduce", "solve", "certify", "lift", "oracle"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->set_help_flag("--help", "print help");
        sub->add_option("--config", ov.config_path, "JSON config file")->required();
        sub->add_option("--out", ov.out_dir, "output directory");
        sub->add_option("--seed", ov.seed, "random seed override");
        sub->add_option("--h", ov.h, "grid spacing / step override");
        sub->add_option("--p", ov.p, "exponent override");
        sub->callback([&command, name]() { command = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = io::read_json(ov.config_path);
        if (command == "verify-algebra") return cmd_verify_algebra(cfg, ov);
        if (command == "reduce") return cmd_reduce(cfg, ov);
        if (command == "solve") return cmd_solve(cfg, ov);
        if (command == "certify") return cmd_certify(cfg, ov);
        if (command == "lift") return cmd_lift(cfg, ov);
        if (command == "oracle") return cmd_oracle(cfg, ov);
        std::cerr << "unknown command\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "argument error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

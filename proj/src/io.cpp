#include "supercrit/io.hpp"

#include <fstream>

namespace supercrit::io {

using solver::Field;
using solver::MaskedGrid;

namespace {

void require_open(const std::ofstream& out, const std::filesystem::path& path) {
    if (!out) throw ConfigError("cannot write " + path.string());
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void save_field_csv(const std::filesystem::path& path, const Field& field) {
    const MaskedGrid& g = *field.grid;
    std::ofstream out(path);
    require_open(out, path);
    out << (g.dim == 2 ? "x,y,value\n" : "x,y,z,value\n");
    for (std::int64_t i = 0; i < g.inside_count(); ++i) {
        const Point x = g.point_at(g.nodes[i]);
        for (int q = 0; q < g.dim; ++q) out << fmt(x[q]) << ',';
        out << fmt(field.values[i]) << '\n';
    }
}

void save_field_pgm(const std::filesystem::path& path, const Field& field) {
    const MaskedGrid& g = *field.grid;
    double lo = kInf, hi = -kInf;
    for (double v : field.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (field.values.empty()) lo = hi = 0.0;
    const double span = hi > lo ? hi - lo : 1.0;

    std::ofstream out(path, std::ios::binary);
    require_open(out, path);
    const int nx = g.extents[0], ny = g.extents[1];
    out << "P5\n# min=" << fmt(lo) << " max=" << fmt(hi) << "\n" << nx << ' ' << ny << "\n255\n";
    const int kslice = g.dim == 3 ? g.extents[2] / 2 : 0;
    std::string row(nx, '\0');
    for (int j = ny - 1; j >= 0; --j) {
        for (int i = 0; i < nx; ++i) {
            const std::int32_t c = g.compact[g.lattice_index(i, j, kslice)];
            const double v = c >= 0 ? field.values[c] : lo;
            row[i] = static_cast<char>(std::clamp(int(255.0 * (v - lo) / span + 0.5), 0, 255));
        }
        out.write(row.data(), nx);
    }
}

json report_to_json(const solver::SolveReport& report) {
    json j;
    j["p"] = report.p;
    j["energy"] = report.energy;
    j["gradientNorm"] = report.gradient_norm;
    j["residualSup"] = report.residual_sup;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    return j;
}

json grid_to_json(const MaskedGrid& grid) {
    json j;
    j["dim"] = grid.dim;
    j["h"] = grid.h;
    j["origin"] = std::vector<double>(grid.origin.begin(), grid.origin.begin() + grid.dim);
    j["extents"] = std::vector<int>(grid.extents.begin(), grid.extents.begin() + grid.dim);
    j["inside_nodes"] = grid.inside_count();
    return j;
}

LoadedField load_field(const json& grid_meta, const std::filesystem::path& csv_path) {
    auto grid = std::make_shared<MaskedGrid>();
    grid->dim = grid_meta.at("dim").get<int>();
    grid->h = grid_meta.at("h").get<double>();
    const auto origin = grid_meta.at("origin").get<std::vector<double>>();
    const auto extents = grid_meta.at("extents").get<std::vector<int>>();
    for (int q = 0; q < grid->dim; ++q) {
        grid->origin[q] = origin[q];
        grid->extents[q] = extents[q];
    }
    grid->mask.assign(grid->lattice_size(), 0);
    grid->compact.assign(grid->lattice_size(), -1);

    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot read " + csv_path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Point x(grid->dim);
        double value = 0.0;
        std::size_t pos = 0;
        for (int q = 0; q <= grid->dim; ++q) {
            const std::size_t comma = line.find(',', pos);
            const std::string tok = line.substr(pos, comma == std::string::npos
                                                         ? std::string::npos
                                                         : comma - pos);
            const double v = std::stod(tok);
            if (q < grid->dim) x[q] = v;
            else value = v;
            pos = comma + 1;
        }
        std::array<int, 3> c{};
        for (int q = 0; q < grid->dim; ++q) {
            c[q] = static_cast<int>(std::llround((x[q] - grid->origin[q]) / grid->h));
            if (c[q] < 0 || c[q] >= grid->extents[q])
                throw ConfigError("field CSV node falls outside the recorded grid");
        }
        const std::int64_t lat = grid->lattice_index(c[0], c[1], c[2]);
        grid->mask[lat] = 1;
        grid->compact[lat] = static_cast<std::int32_t>(grid->nodes.size());
        grid->nodes.push_back(lat);
        values.push_back(value);
    }

    LoadedField out;
    out.field.grid = std::move(grid);
    out.field.values = std::move(values);
    return out;
}

json profile_to_json(const geometry::ProfileDomain& profile) {
    json j;
    j["dimension"] = profile.dimension;
    j["kind"] = profile.kind;
    j["parameters"] = profile.parameters;
    json samples = json::array();
    for (const auto& b : profile.boundary)
        samples.push_back({{"point", b.point}, {"normal", b.normal}, {"weight", b.weight}});
    j["samples"] = std::move(samples);
    return j;
}

geometry::ProfileDomain profile_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    geometry::ProfileDomain p = geometry::make_profile(kind, j.at("parameters"));
    if (j.contains("samples") && !j.at("samples").empty()) {
        p.boundary.clear();
        for (const auto& s : j.at("samples"))
            p.boundary.push_back({s.at("point").get<Point>(), s.at("normal").get<Point>(),
                                  s.at("weight").get<double>()});
    }
    if (p.dimension != j.at("dimension").get<int>())
        throw ConfigError("profile JSON dimension does not match its parameters");
    return p;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    require_open(out, path);
    out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("JSON parse error in " + path.string() + ": " + e.what());
    }
}

}  // namespace supercrit::io

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "supercrit/geometry.hpp"
#include "supercrit/solver.hpp"

namespace supercrit::io {

using json = nlohmann::ordered_json;

/// One row per inside node: coordinates then value.
void save_field_csv(const std::filesystem::path& path, const solver::Field& field);

/// P5 grayscale heatmap, min/max annotated in a header comment. 3-D fields
/// are sliced through the central plane of the last axis.
void save_field_pgm(const std::filesystem::path& path, const solver::Field& field);

json report_to_json(const solver::SolveReport& report);

/// Grid metadata sufficient to rebuild the lattice (the mask comes from the
/// CSV rows).
json grid_to_json(const solver::MaskedGrid& grid);

struct LoadedField {
    solver::Field field;
};

/// Rebuilds a field from grid metadata + CSV written by save_field_csv.
LoadedField load_field(const json& grid_meta, const std::filesystem::path& csv_path);

json profile_to_json(const geometry::ProfileDomain& profile);
geometry::ProfileDomain profile_from_json(const json& j);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

}  // namespace supercrit::io

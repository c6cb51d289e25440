#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvlab/observables.hpp"
#include "mvlab/solver.hpp"

namespace mvlab {

/// Shortest text for a double that is exact under round trip (17 digits).
std::string format_double(double value);

/// One RFC-4180 field: quoted when it holds a comma, quote or line break.
std::string csv_field(std::string_view value);

/// Splits one CSV record (no trailing newline) into unquoted fields.
std::vector<std::string> parse_csv_record(std::string_view line);

/// Writes to a sibling temporary and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Columns t,F,F_ent,F_int,dissipation,peak,m2.
std::string ledger_to_csv(const EnergyLedger& ledger);
EnergyLedger ledger_from_csv(std::string_view text);

nlohmann::json segmentation_to_json(const RegimeSegmentation& segmentation);
RegimeSegmentation segmentation_from_json(const nlohmann::json& doc);

/// Long format t,x,rho.
std::string snapshots_to_csv(const std::vector<Snapshot>& snapshots);

}  // namespace mvlab

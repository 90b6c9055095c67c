#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "roughcadlag/dyadic.hpp"
#include "roughcadlag/extension.hpp"
#include "roughcadlag/lift.hpp"
#include "roughcadlag/paths.hpp"
#include "roughcadlag/pvar.hpp"

namespace roughcadlag {

/// Path CSV: header `t,x1,...,xd`, one row per sample, 17 significant
/// digits. A path whose horizon lies past its last sample gets a closing row
/// (T, X_T), which leaves the staircase unchanged; on reading, T is the last
/// row's time.
void write_path_csv(std::ostream& out, const CadlagPath& path);
CadlagPath read_path_csv(std::istream& in);

void save_path_csv(const std::filesystem::path& file, const CadlagPath& path);
CadlagPath load_path_csv(const std::filesystem::path& file);

/// {p, T, times, X, I, meta: {method, level, gap, tol, stabilized, ...}}
nlohmann::json to_json(const RoughLift& lift);
/// Throws SchemaError naming the offending field.
RoughLift lift_from_json(const nlohmann::json& j);

/// {p, value, raw_sup, partition}
nlohmann::json to_json(const VariationResult& result);
/// {levels, errors, slope, intercept, r2, excluded}
nlohmann::json to_json(const RateFit& fit);
/// {phi, g_times, g_values, max_holder_ratio}
nlohmann::json to_json(const TimeChange& change);

nlohmann::json load_json(const std::filesystem::path& file);
/// Writes `j.dump(2)` plus a trailing newline.
void save_json(const std::filesystem::path& file, const nlohmann::json& j);

}  // namespace roughcadlag

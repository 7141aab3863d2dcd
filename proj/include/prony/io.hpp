#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "prony/ensemble.hpp"
#include "prony/moments.hpp"

namespace prony {

using Json = nlohmann::json;
using Ensemble = std::variant<TorusEnsemble, SphereEnsemble>;
using Moments = std::variant<TorusMoments, SphereMoments>;

inline constexpr int kFormatVersion = 1;

// Documents carry {"format_version": 1, "kind": ..., "domain": "torus" |
// "sphere"}. Complex numbers are [re, im] pairs. Doubles are written in
// shortest round-trip form.
//
// ensemble  torus:  "dimension", "points": [[t_1..t_d], ...], "coefficients": [[re, im], ...]
//           sphere: "points": [[x, y, z], ...], "coefficients": [c, ...]
// moments   torus:  "dimension", "order", "entries": [{"index": [k_1..k_d], "value": [re, im]}, ...]
//           sphere: "degree", "entries": [{"k": k, "l": l, "value": v}, ...]
// An optional "meta" object is preserved by the caller and ignored here.

Json to_json(const TorusEnsemble& ensemble);
Json to_json(const SphereEnsemble& ensemble);
Json to_json(const TorusMoments& moments);
Json to_json(const SphereMoments& moments);
Json to_json(const Ensemble& ensemble);
Json to_json(const Moments& moments);

/// Throws Error on a wrong kind or version, malformed fields, or (moments)
/// a table with missing or repeated entries.
Ensemble ensemble_from_json(const Json& doc);
Moments moments_from_json(const Json& doc);

/// Throws unless doc["format_version"] == kFormatVersion and doc["kind"] == kind.
void require_document(const Json& doc, const std::string& kind);

/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& file, const std::string& contents);
void write_json(const std::filesystem::path& file, const Json& doc);
Json read_json(const std::filesystem::path& file);

using ScalarField = std::pair<std::string, std::vector<double>>;

/// CSV with header "x,y,z,<names...>" and one row per point.
std::string scalar_fields_csv(std::span<const Eigen::Vector3d> points, std::span<const ScalarField> fields);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace prony

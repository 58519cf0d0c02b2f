#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "cartometry/boundary_fit.hpp"
#include "cartometry/calibration.hpp"
#include "cartometry/session.hpp"

namespace carto {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchemaVersion = "1";

/// Canonical session document: two-space indented UTF-8 with a trailing
/// newline, keys in schema order, arrays of scalars on one line, doubles in
/// shortest round-trip form.
std::string serialize_session(const Session& session);

/// Parses and validates a session document. Throws schema_violation with a
/// line/column or JSON-pointer location, or unsupported_version.
Session parse_session(std::string_view text);

void save_session(const Session& session, const std::filesystem::path& path);
Session load_session(const std::filesystem::path& path);

Json session_to_json(const Session& session);
Session session_from_json(const Json& doc);

Json feature_to_json(const Feature& feature);
Json control_point_to_json(const ControlPoint& cp);
// `where` prefixes field paths in diagnostics.
ControlPoint control_point_from_json(const Json& j, const std::string& where);

// Fields: kind, coefficients, flip_v, rms_residual.
Json transform_to_json(const CalibrationTransform& t);

// Fields: feature_id, kind, planar, geodesic, anomaly_ratio, bbox_w, bbox_h,
// bbox_area, simple, display_value, display_unit. Absent values are null.
Json report_to_json(const MeasurementReport& report);

// Fields: feature_id, n, rms_error, area, a0, c0, a, b, c, d.
Json fit_to_json(std::string_view feature_id, const FitReport& fit);

// Transform fields plus control_points (count) and residual_warning.
Json calibration_result_to_json(const Session& calibrated);

// Single-line form shared by the CLI --json output and the REST service.
std::string dump_compact(const Json& j);

}  // namespace carto

#include "cartometry/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cartometry/atomic_file.hpp"
#include "cartometry/error.hpp"

namespace carto {
namespace {

[[noreturn]] void violation(const std::string& where, const std::string& message) {
    throw Error(ErrorCode::schema_violation, (where.empty() ? "/" : where) + ": " + message,
                where.empty() ? "/" : where);
}

const Json& member(const Json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) violation(where + "/" + key, "missing required field");
    return *it;
}

void require_object(const Json& j, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) violation(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (auto key : allowed) known = known || it.key() == key;
        if (!known) violation(where + "/" + it.key(), "unknown field");
    }
}

std::string get_string(const Json& j, const std::string& where) {
    if (!j.is_string()) violation(where, "expected a string");
    return j.get<std::string>();
}

double get_number(const Json& j, const std::string& where) {
    if (!j.is_number()) violation(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) violation(where, "expected a finite number");
    return v;
}

long long get_count(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) violation(where, "expected a non-negative integer");
    const auto v = j.get<long long>();
    if (v < 0) violation(where, "expected a non-negative integer");
    return v;
}

std::pair<double, double> get_pair(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) violation(where, "expected a [number, number] pair");
    return {get_number(j[0], where + "/0"), get_number(j[1], where + "/1")};
}

template <typename Enum, typename Parse>
Enum get_enum(const Json& j, const std::string& where, Parse parse) {
    const std::string text = get_string(j, where);
    try {
        return parse(text);
    } catch (const Error& e) {
        violation(where, e.what());
    }
}

Json pair_json(double a, double b) { return Json::array({a, b}); }

bool is_flat_array(const Json& j) {
    return j.is_array() && std::none_of(j.begin(), j.end(), [](const Json& e) {
        return e.is_structured();
    });
}

// Like dump(2), except arrays of scalars stay on one line so that every
// coordinate pair occupies a single line of the file.
void write_pretty(const Json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    if (j.is_object() && !j.empty()) {
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(it.key()).dump(-1, ' ', false, Json::error_handler_t::strict) + ": ";
            write_pretty(it.value(), out, depth + 1);
        }
        out += "\n" + close_pad + "}";
    } else if (j.is_array() && !j.empty() && !is_flat_array(j)) {
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i > 0) out += ",\n";
            out += pad;
            write_pretty(j[i], out, depth + 1);
        }
        out += "\n" + close_pad + "]";
    } else if (j.is_array() && !j.empty()) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i > 0) out += ", ";
            out += j[i].dump(-1, ' ', false, Json::error_handler_t::strict);
        }
        out += "]";
    } else {
        out += j.dump(-1, ' ', false, Json::error_handler_t::strict);
    }
}

// Turns a byte offset into "line L, column C".
std::string text_position(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

Feature feature_from_json(const Json& j, const std::string& where) {
    require_object(j, where, {"id", "kind", "name", "points"});
    Feature f;
    f.id = get_string(member(j, where, "id"), where + "/id");
    f.kind = get_enum<FeatureKind>(member(j, where, "kind"), where + "/kind", parse_feature_kind);
    f.name = get_string(member(j, where, "name"), where + "/name");
    const Json& points = member(j, where, "points");
    if (!points.is_array()) violation(where + "/points", "expected an array");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [u, v] = get_pair(points[i], where + "/points/" + std::to_string(i));
        f.pixel_points.push_back({u, v});
    }
    return f;
}

Calibration calibration_from_json(const Json& j, const std::string& where) {
    require_object(j, where, {"kind", "coefficients", "flip_v", "rms_residual", "control_points"});
    const auto kind = get_enum<TransformKind>(member(j, where, "kind"), where + "/kind",
                                              parse_transform_kind);
    const Json& coeff_json = member(j, where, "coefficients");
    const std::size_t expected = kind == TransformKind::similarity ? 4 : 6;
    if (!coeff_json.is_array() || coeff_json.size() != expected) {
        violation(where + "/coefficients",
                  "expected an array of " + std::to_string(expected) + " numbers");
    }
    std::vector<double> c;
    for (std::size_t i = 0; i < expected; ++i) {
        c.push_back(get_number(coeff_json[i], where + "/coefficients/" + std::to_string(i)));
    }

    bool flip_v = true;
    if (auto it = j.find("flip_v"); it != j.end()) {
        if (!it->is_boolean()) violation(where + "/flip_v", "expected a boolean");
        flip_v = it->get<bool>();
    }

    Calibration cal;
    try {
        cal.transform = kind == TransformKind::similarity
                            ? CalibrationTransform::similarity(c[0], c[1], c[2], c[3], flip_v)
                            : CalibrationTransform::affine(c[0], c[1], c[2], c[3], c[4], c[5]);
    } catch (const Error& e) {
        violation(where + "/coefficients", e.what());
    }

    const Json& cps = member(j, where, "control_points");
    if (!cps.is_array()) violation(where + "/control_points", "expected an array");
    for (std::size_t i = 0; i < cps.size(); ++i) {
        cal.control_points.push_back(
            control_point_from_json(cps[i], where + "/control_points/" + std::to_string(i)));
    }

    if (auto it = j.find("rms_residual"); it != j.end()) {
        const double rms = get_number(*it, where + "/rms_residual");
        if (rms < 0.0) violation(where + "/rms_residual", "expected a non-negative number");
        cal.transform = cal.transform.with_residual(rms);
    } else if (!cal.control_points.empty()) {
        cal.transform = cal.transform.with_residual(rms_residual(cal.transform, cal.control_points));
    }
    return cal;
}

}  // namespace

Json control_point_to_json(const ControlPoint& cp) {
    Json j;
    j["pixel"] = pair_json(cp.pixel.u, cp.pixel.v);
    if (const auto* geo = std::get_if<GeoPoint>(&cp.target)) {
        j["geo"] = pair_json(geo->lat, geo->lon);
    } else {
        const auto& w = std::get<WorldPoint>(cp.target);
        j["world"] = pair_json(w.x, w.y);
    }
    j["label"] = cp.label;
    return j;
}

ControlPoint control_point_from_json(const Json& j, const std::string& where) {
    require_object(j, where, {"pixel", "world", "geo", "label"});
    ControlPoint cp;
    const auto [u, v] = get_pair(member(j, where, "pixel"), where + "/pixel");
    cp.pixel = {u, v};
    const bool has_world = j.contains("world");
    const bool has_geo = j.contains("geo");
    if (has_world == has_geo) violation(where, "expected exactly one of 'world' or 'geo'");
    if (has_world) {
        const auto [x, y] = get_pair(j["world"], where + "/world");
        cp.target = WorldPoint{x, y};
    } else {
        const auto [lat, lon] = get_pair(j["geo"], where + "/geo");
        const GeoPoint g{lat, lon};
        try {
            validate(g);
        } catch (const Error& e) {
            violation(where + "/geo", e.what());
        }
        cp.target = g;
    }
    if (auto it = j.find("label"); it != j.end()) cp.label = get_string(*it, where + "/label");
    return cp;
}

Json feature_to_json(const Feature& feature) {
    Json j;
    j["id"] = feature.id;
    j["kind"] = to_string(feature.kind);
    j["name"] = feature.name;
    Json points = Json::array();
    for (const auto& p : feature.pixel_points) points.push_back(pair_json(p.u, p.v));
    j["points"] = std::move(points);
    return j;
}

Json transform_to_json(const CalibrationTransform& t) {
    Json j;
    j["kind"] = to_string(t.kind());
    j["coefficients"] = t.coefficients();
    if (t.kind() == TransformKind::similarity) j["flip_v"] = t.flip_v();
    j["rms_residual"] = t.rms_residual();
    return j;
}

Json session_to_json(const Session& session) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["image"] = {{"path", session.image.path},
                  {"width_px", session.image.width_px},
                  {"height_px", session.image.height_px}};
    j["projection"] = to_string(session.projection);
    j["display_unit"] = to_string(session.display_unit);
    if (session.calibration) {
        Json cal = transform_to_json(session.calibration->transform);
        Json cps = Json::array();
        for (const auto& cp : session.calibration->control_points) {
            cps.push_back(control_point_to_json(cp));
        }
        cal["control_points"] = std::move(cps);
        j["calibration"] = std::move(cal);
    } else {
        j["calibration"] = nullptr;
    }
    Json features = Json::array();
    for (const auto& f : session.features) features.push_back(feature_to_json(f));
    j["features"] = std::move(features);
    return j;
}

Session session_from_json(const Json& doc) {
    if (!doc.is_object()) violation("", "expected a JSON object");
    const Json& version = member(doc, "", "schema_version");
    if (!version.is_string()) violation("/schema_version", "expected a string");
    if (version.get<std::string>() != kSchemaVersion) {
        throw Error(ErrorCode::unsupported_version,
                    "unsupported schema_version '" + version.get<std::string>() + "'",
                    "/schema_version");
    }
    require_object(doc, "", {"schema_version", "image", "projection", "display_unit",
                             "calibration", "features"});

    Session s;
    const Json& image = member(doc, "", "image");
    require_object(image, "/image", {"path", "width_px", "height_px"});
    s.image.path = get_string(member(image, "/image", "path"), "/image/path");
    s.image.width_px = get_count(member(image, "/image", "width_px"), "/image/width_px");
    s.image.height_px = get_count(member(image, "/image", "height_px"), "/image/height_px");
    s.projection =
        get_enum<Projection>(member(doc, "", "projection"), "/projection", parse_projection);
    s.display_unit = get_enum<DisplayUnit>(member(doc, "", "display_unit"), "/display_unit",
                                           parse_display_unit);

    const Json& cal = member(doc, "", "calibration");
    if (!cal.is_null()) s.calibration = calibration_from_json(cal, "/calibration");

    const Json& features = member(doc, "", "features");
    if (!features.is_array()) violation("/features", "expected an array");
    for (std::size_t i = 0; i < features.size(); ++i) {
        s.features.push_back(feature_from_json(features[i], "/features/" + std::to_string(i)));
    }
    validate(s);
    return s;
}

std::string serialize_session(const Session& session) {
    try {
        std::string out;
        write_pretty(session_to_json(session), out, 0);
        out += "\n";
        return out;
    } catch (const nlohmann::json::type_error& e) {
        throw Error(ErrorCode::invalid_input, std::string("cannot serialize session: ") + e.what());
    }
}

Session parse_session(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw Error(ErrorCode::schema_violation,
                    "malformed JSON at " + text_position(text, at) + ": " + e.what());
    }
    return session_from_json(doc);
}

void save_session(const Session& session, const std::filesystem::path& path) {
    validate(session);
    write_file_atomic(path, serialize_session(session));
}

Session load_session(const std::filesystem::path& path) {
    return parse_session(read_file(path));
}

Json report_to_json(const MeasurementReport& report) {
    Json j;
    j["feature_id"] = report.feature_id;
    j["kind"] = to_string(report.kind);
    j["planar"] = report.planar_value;
    j["geodesic"] = report.geodesic_value ? Json(*report.geodesic_value) : Json(nullptr);
    j["anomaly_ratio"] = report.anomaly_ratio ? Json(*report.anomaly_ratio) : Json(nullptr);
    j["bbox_w"] = report.bounding_box.width;
    j["bbox_h"] = report.bounding_box.height;
    j["bbox_area"] = report.bounding_box.area;
    j["simple"] = report.simple;
    j["display_value"] = report.display_value;
    std::string unit(to_string(report.display_unit));
    if (report.quantity() == Quantity::area) unit += "2";
    j["display_unit"] = unit;
    return j;
}

Json fit_to_json(std::string_view feature_id, const FitReport& fit) {
    Json j;
    j["feature_id"] = feature_id;
    j["n"] = fit.boundary.harmonics();
    j["rms_error"] = fit.rms_error;
    j["area"] = fit.area;
    j["a0"] = fit.boundary.a0;
    j["c0"] = fit.boundary.c0;
    j["a"] = fit.boundary.a;
    j["b"] = fit.boundary.b;
    j["c"] = fit.boundary.c;
    j["d"] = fit.boundary.d;
    return j;
}

Json calibration_result_to_json(const Session& session) {
    if (!session.calibration) {
        throw Error(ErrorCode::uncalibrated_session, "session is not calibrated");
    }
    Json j = transform_to_json(session.calibration->transform);
    j["control_points"] = session.calibration->control_points.size();
    j["residual_warning"] = residual_warning(session);
    return j;
}

std::string dump_compact(const Json& j) { return j.dump(); }

}  // namespace carto

#include "cartometry/session.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cartometry/error.hpp"
#include "cartometry/geodesy.hpp"

namespace carto {
namespace {

double unit_factor(DisplayUnit unit) {
    switch (unit) {
        case DisplayUnit::m: return 1000.0;
        case DisplayUnit::km: return 1.0;
        case DisplayUnit::mi: return kMilesPerKm;
    }
    throw Error(ErrorCode::invalid_input, "unsupported display unit");
}

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

std::vector<PixelPoint> outline_pixels(const Feature& feature) {
    std::vector<PixelPoint> pts = feature.pixel_points;
    if (feature.kind == FeatureKind::region && pts.size() > 1 && pts.front() == pts.back()) {
        pts.pop_back();
    }
    return pts;
}

const Calibration& require_calibration(const Session& session) {
    if (!session.calibration) {
        throw Error(ErrorCode::uncalibrated_session, "session is not calibrated");
    }
    return *session.calibration;
}

}  // namespace

std::string_view to_string(FeatureKind kind) noexcept {
    return kind == FeatureKind::route ? "route" : "region";
}

std::string_view to_string(Projection projection) noexcept {
    return projection == Projection::web_mercator ? "web_mercator" : "planar_unknown";
}

std::string_view to_string(DisplayUnit unit) noexcept {
    switch (unit) {
        case DisplayUnit::m: return "m";
        case DisplayUnit::km: return "km";
        case DisplayUnit::mi: return "mi";
    }
    return "km";
}

std::string_view to_string(TransformKind kind) noexcept {
    return kind == TransformKind::similarity ? "similarity" : "affine";
}

FeatureKind parse_feature_kind(std::string_view text) {
    if (text == "route") return FeatureKind::route;
    if (text == "region") return FeatureKind::region;
    throw Error(ErrorCode::invalid_input, "unknown feature kind " + quoted(text));
}

Projection parse_projection(std::string_view text) {
    if (text == "web_mercator") return Projection::web_mercator;
    if (text == "planar_unknown") return Projection::planar_unknown;
    throw Error(ErrorCode::invalid_input, "unknown projection " + quoted(text));
}

DisplayUnit parse_display_unit(std::string_view text) {
    if (text == "m") return DisplayUnit::m;
    if (text == "km") return DisplayUnit::km;
    if (text == "mi") return DisplayUnit::mi;
    throw Error(ErrorCode::invalid_input, "unsupported unit " + quoted(text));
}

TransformKind parse_transform_kind(std::string_view text) {
    if (text == "similarity") return TransformKind::similarity;
    if (text == "affine") return TransformKind::affine;
    throw Error(ErrorCode::invalid_input, "unknown transform kind " + quoted(text));
}

double convert_display(double value_km, DisplayUnit unit, Quantity quantity) {
    const double f = unit_factor(unit);
    return quantity == Quantity::area ? value_km * f * f : value_km * f;
}

double convert_from_display(double value, DisplayUnit unit, Quantity quantity) {
    const double f = unit_factor(unit);
    return quantity == Quantity::area ? value / (f * f) : value / f;
}

std::string unit_label(DisplayUnit unit, Quantity quantity) {
    std::string label(to_string(unit));
    if (quantity == Quantity::area) label += "²";
    return label;
}

bool Feature::complete() const noexcept {
    const std::size_t need = kind == FeatureKind::route ? 2 : 3;
    return outline_pixels(*this).size() >= need;
}

bool Calibration::georeferenced() const noexcept {
    return !control_points.empty() && control_points.front().georeferenced();
}

const Feature* Session::find_feature(std::string_view id) const noexcept {
    auto it = std::find_if(features.begin(), features.end(),
                           [&](const Feature& f) { return f.id == id; });
    return it == features.end() ? nullptr : &*it;
}

const Feature& Session::feature(std::string_view id) const {
    if (const Feature* f = find_feature(id)) return *f;
    throw Error(ErrorCode::not_found, "feature not found: " + quoted(id));
}

void validate(const Session& session) {
    if (session.image.width_px < 0 || session.image.height_px < 0) {
        throw Error(ErrorCode::schema_violation, "image dimensions must be non-negative",
                    "/image");
    }
    std::set<std::string, std::less<>> ids;
    for (std::size_t i = 0; i < session.features.size(); ++i) {
        const Feature& f = session.features[i];
        const std::string where = "/features/" + std::to_string(i);
        if (f.id.empty()) throw Error(ErrorCode::schema_violation, "empty feature id", where + "/id");
        if (!ids.insert(f.id).second) {
            throw Error(ErrorCode::schema_violation, "duplicate feature id " + quoted(f.id),
                        where + "/id");
        }
        for (std::size_t j = 0; j < f.pixel_points.size(); ++j) {
            const PixelPoint& p = f.pixel_points[j];
            const std::string at = where + "/points/" + std::to_string(j);
            if (!std::isfinite(p.u) || !std::isfinite(p.v)) {
                throw Error(ErrorCode::schema_violation, "non-finite pixel coordinate", at);
            }
            if (j > 0 && std::hypot(p.u - f.pixel_points[j - 1].u,
                                    p.v - f.pixel_points[j - 1].v) <= kCoincidenceTolerance) {
                throw Error(ErrorCode::schema_violation, "point repeats its predecessor", at);
            }
        }
    }
    if (session.calibration) {
        const auto& cps = session.calibration->control_points;
        for (std::size_t i = 0; i < cps.size(); ++i) {
            if (cps[i].georeferenced() != cps.front().georeferenced()) {
                throw Error(ErrorCode::schema_violation,
                            "control points mix geographic and planar targets",
                            "/calibration/control_points/" + std::to_string(i));
            }
        }
        if (session.calibration->georeferenced() &&
            session.projection != Projection::web_mercator) {
            throw Error(ErrorCode::schema_violation,
                        "geographic control points require the web_mercator projection",
                        "/projection");
        }
    }
}

Session add_feature(const Session& session, Feature feature) {
    if (feature.id.empty()) throw Error(ErrorCode::invalid_input, "feature id must not be empty");
    if (session.find_feature(feature.id)) {
        throw Error(ErrorCode::invalid_input, "duplicate feature id " + quoted(feature.id));
    }
    Session next = session;
    next.features.push_back(std::move(feature));
    validate(next);
    return next;
}

Session add_point(const Session& session, std::string_view feature_id, PixelPoint p) {
    if (!std::isfinite(p.u) || !std::isfinite(p.v)) {
        throw Error(ErrorCode::invalid_input, "non-finite pixel coordinate");
    }
    const Feature& existing = session.feature(feature_id);
    if (!existing.pixel_points.empty()) {
        const PixelPoint& last = existing.pixel_points.back();
        if (std::hypot(p.u - last.u, p.v - last.v) <= kCoincidenceTolerance) {
            throw Error(ErrorCode::duplicate_point, "point repeats the last point of " +
                                                        quoted(feature_id));
        }
    }
    Session next = session;
    auto it = std::find_if(next.features.begin(), next.features.end(),
                           [&](const Feature& f) { return f.id == feature_id; });
    it->pixel_points.push_back(p);
    return next;
}

Session with_calibration(const Session& session, Calibration calibration) {
    Session next = session;
    next.calibration = std::move(calibration);
    validate(next);
    return next;
}

Session with_display_unit(const Session& session, DisplayUnit unit) {
    Session next = session;
    next.display_unit = unit;
    return next;
}

bool within_image(const Session& session, const PixelPoint& p) noexcept {
    return p.u >= 0.0 && p.v >= 0.0 && p.u <= static_cast<double>(session.image.width_px) &&
           p.v <= static_cast<double>(session.image.height_px);
}

Session calibrate(const Session& session, std::vector<ControlPoint> pairs, TransformKind kind) {
    if (!pairs.empty() && pairs.front().georeferenced() &&
        session.projection != Projection::web_mercator) {
        throw Error(ErrorCode::invalid_input,
                    "geographic control points need a web_mercator session");
    }
    Calibration cal;
    cal.transform = kind == TransformKind::similarity ? fit_similarity(pairs) : fit_affine(pairs);
    cal.control_points = std::move(pairs);
    return with_calibration(session, std::move(cal));
}

bool residual_warning(const Session& session) {
    if (!session.calibration) return false;
    const auto& t = session.calibration->transform;
    const double diagonal = world_diagonal(t, static_cast<double>(session.image.width_px),
                                           static_cast<double>(session.image.height_px));
    return t.rms_residual() > kResidualWarningFraction * diagonal;
}

std::vector<WorldPoint> world_points(const Session& session, const Feature& feature) {
    const Calibration& cal = require_calibration(session);
    std::vector<WorldPoint> out;
    for (const PixelPoint& p : outline_pixels(feature)) out.push_back(apply(cal.transform, p));
    return out;
}

Polygon region_polygon(const Session& session, std::string_view feature_id) {
    const Feature& f = session.feature(feature_id);
    if (f.kind != FeatureKind::region) {
        throw Error(ErrorCode::invalid_input, "feature " + quoted(feature_id) + " is not a region");
    }
    if (!f.complete()) {
        throw Error(ErrorCode::incomplete_feature,
                    "region " + quoted(feature_id) + " needs at least 3 points");
    }
    return Polygon(world_points(session, f));
}

MeasurementReport measure_feature(const Session& session, std::string_view feature_id) {
    return measure_feature(session, feature_id, session.display_unit);
}

MeasurementReport measure_feature(const Session& session, std::string_view feature_id,
                                  DisplayUnit unit) {
    const Feature& f = session.feature(feature_id);
    const Calibration& cal = require_calibration(session);
    if (!f.complete()) {
        throw Error(ErrorCode::incomplete_feature,
                    std::string(to_string(f.kind)) + " " + quoted(feature_id) + " has too few points");
    }
    const std::vector<WorldPoint> world = world_points(session, f);

    MeasurementReport r;
    r.feature_id = f.id;
    r.kind = f.kind;
    r.bounding_box = bounding_box(world);
    r.display_unit = unit;

    const bool geodesic = session.projection == Projection::web_mercator && cal.georeferenced();
    std::vector<GeoPoint> geo;
    if (geodesic) {
        for (const WorldPoint& w : world) geo.push_back(mercator_inverse({w.x, w.y}));
    }

    if (f.kind == FeatureKind::route) {
        const Polyline line(world);
        r.planar_value = polyline_length(line);
        r.simple = is_simple(line);
        if (geodesic) r.geodesic_value = haversine_path_length(geo);
    } else {
        const Polygon poly(world);
        r.planar_value = polygon_area(poly);
        r.simple = is_simple(poly);
        if (geodesic) r.geodesic_value = geodesic_polygon_area(geo);
    }
    if (r.geodesic_value && *r.geodesic_value > 0.0) {
        r.anomaly_ratio = anomaly_ratio(r.planar_value, *r.geodesic_value);
    }
    r.display_value = convert_display(r.planar_value, unit, r.quantity());
    return r;
}

}  // namespace carto

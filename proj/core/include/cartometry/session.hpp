#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cartometry/calibration.hpp"
#include "cartometry/geom.hpp"

namespace carto {

enum class FeatureKind { route, region };
enum class Projection { web_mercator, planar_unknown };
enum class DisplayUnit { m, km, mi };
enum class Quantity { length, area };

std::string_view to_string(FeatureKind kind) noexcept;
std::string_view to_string(Projection projection) noexcept;
std::string_view to_string(DisplayUnit unit) noexcept;
std::string_view to_string(TransformKind kind) noexcept;

// Parsers throw invalid_input on unknown names.
FeatureKind parse_feature_kind(std::string_view text);
Projection parse_projection(std::string_view text);
DisplayUnit parse_display_unit(std::string_view text);
TransformKind parse_transform_kind(std::string_view text);

// Kilometers to miles, as used for display.
inline constexpr double kMilesPerKm = 0.621371;

/// km (or km^2 for areas) to the display unit. Pure: nothing stored changes.
double convert_display(double value_km, DisplayUnit unit, Quantity quantity = Quantity::length);
double convert_from_display(double value, DisplayUnit unit, Quantity quantity = Quantity::length);

// "km", "km²", "mi", "m²", ...
std::string unit_label(DisplayUnit unit, Quantity quantity);

/// A traced route or region. Pixel points are the ground truth; world
/// coordinates are always derived through the session calibration.
struct Feature {
    std::string id;
    FeatureKind kind = FeatureKind::route;
    std::string name;
    std::vector<PixelPoint> pixel_points;

    // Enough points to be measured (route >= 2, region >= 3).
    bool complete() const noexcept;
    friend bool operator==(const Feature&, const Feature&) = default;
};

struct ImageRef {
    std::string path;
    long long width_px = 0;
    long long height_px = 0;

    friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct Calibration {
    CalibrationTransform transform = CalibrationTransform::identity();
    std::vector<ControlPoint> control_points;

    bool georeferenced() const noexcept;
    friend bool operator==(const Calibration&, const Calibration&) = default;
};

/// The persisted unit of work. Treat as a value: the operations below
/// return new sessions and never modify their argument.
struct Session {
    ImageRef image;
    Projection projection = Projection::web_mercator;
    DisplayUnit display_unit = DisplayUnit::km;
    std::optional<Calibration> calibration;
    std::vector<Feature> features;

    const Feature* find_feature(std::string_view id) const noexcept;
    const Feature& feature(std::string_view id) const;  // throws not_found
    friend bool operator==(const Session&, const Session&) = default;
};

struct MeasurementReport {
    std::string feature_id;
    FeatureKind kind = FeatureKind::route;
    double planar_value = 0.0;  // km for routes, km^2 for regions
    std::optional<double> geodesic_value;
    std::optional<double> anomaly_ratio;
    BoundingBox bounding_box;
    bool simple = true;
    double display_value = 0.0;
    DisplayUnit display_unit = DisplayUnit::km;

    Quantity quantity() const noexcept {
        return kind == FeatureKind::region ? Quantity::area : Quantity::length;
    }
};

// Checks the session invariants (unique ids, consistent calibration).
void validate(const Session& session);

Session add_feature(const Session& session, Feature feature);
Session add_point(const Session& session, std::string_view feature_id, PixelPoint p);
Session with_calibration(const Session& session, Calibration calibration);
Session with_display_unit(const Session& session, DisplayUnit unit);

bool within_image(const Session& session, const PixelPoint& p) noexcept;

/// Fits the requested transform to `pairs` and stores it (with the pairs)
/// in a new session.
Session calibrate(const Session& session, std::vector<ControlPoint> pairs, TransformKind kind);

// True when the residual exceeds kResidualWarningFraction of the image diagonal.
bool residual_warning(const Session& session);

// Feature pixels mapped to world km; a region's repeated closing point is dropped.
std::vector<WorldPoint> world_points(const Session& session, const Feature& feature);

// Region outline in world km, ready for area or boundary fitting.
Polygon region_polygon(const Session& session, std::string_view feature_id);

MeasurementReport measure_feature(const Session& session, std::string_view feature_id);
MeasurementReport measure_feature(const Session& session, std::string_view feature_id,
                                  DisplayUnit unit);

}  // namespace carto

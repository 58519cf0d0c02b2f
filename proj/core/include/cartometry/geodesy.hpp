#pragma once

#include <numbers>
#include <span>

namespace carto {

// Mean Earth radius (IUGG R1), km. All geodesy here is spherical.
inline constexpr double kEarthRadiusKm = 6371.0088;

// Web Mercator is undefined at and beyond this latitude (degrees).
inline constexpr double kMercatorMaxLatitude = 85.05113;

/// Geographic position in degrees: lat in [-90, 90], lon in (-180, 180].
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Position on the spherical Web Mercator plane, km.
struct MercatorPoint {
    double mx = 0.0;
    double my = 0.0;

    friend bool operator==(const MercatorPoint&, const MercatorPoint&) = default;
};

// Throws invalid_input when out of range or non-finite.
void validate(const GeoPoint& p);

// Wraps any finite longitude into (-180, 180].
double normalize_longitude(double lon_deg) noexcept;

constexpr double to_radians(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
constexpr double to_degrees(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

double haversine_distance(const GeoPoint& a, const GeoPoint& b);

// Sum of great-circle legs along an ordered chain.
double haversine_path_length(std::span<const GeoPoint> points);

MercatorPoint mercator_forward(const GeoPoint& p);
GeoPoint mercator_inverse(const MercatorPoint& m);

// Local length stretch of Web Mercator at a latitude: sec(lat).
double mercator_scale_factor(double lat_deg);

/// Area of a small spherical polygon (edges treated as rhumb-like arcs),
/// km^2. Vertices in order, first not repeated; must not enclose a pole.
double geodesic_polygon_area(std::span<const GeoPoint> vertices);

// planar / geodesic; 1.0 means the map agrees with the ground.
double anomaly_ratio(double planar_value, double geodesic_value);

}  // namespace carto

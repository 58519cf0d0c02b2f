#include "cartometry/geodesy.hpp"

#include <cmath>
#include <string>

#include "cartometry/error.hpp"

namespace carto {
namespace {

using std::numbers::pi;

void require_mercator_domain(double lat_deg) {
    if (!std::isfinite(lat_deg) || std::abs(lat_deg) >= kMercatorMaxLatitude) {
        throw Error(ErrorCode::domain_error,
                    "latitude " + std::to_string(lat_deg) + " outside the Web Mercator domain");
    }
}

// Longitude step wrapped into (-pi, pi] so edges never go the long way round.
double longitude_step(double from_rad, double to_rad) noexcept {
    double d = to_rad - from_rad;
    if (d > pi) d -= 2.0 * pi;
    if (d <= -pi) d += 2.0 * pi;
    return d;
}

}  // namespace

void validate(const GeoPoint& p) {
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon)) {
        throw Error(ErrorCode::invalid_input, "non-finite geographic coordinate");
    }
    if (p.lat < -90.0 || p.lat > 90.0) {
        throw Error(ErrorCode::invalid_input, "latitude out of range: " + std::to_string(p.lat));
    }
    if (p.lon <= -180.0 || p.lon > 180.0) {
        throw Error(ErrorCode::invalid_input, "longitude out of range: " + std::to_string(p.lon));
    }
}

double normalize_longitude(double lon_deg) noexcept {
    double lon = std::fmod(lon_deg, 360.0);
    if (lon > 180.0) lon -= 360.0;
    if (lon <= -180.0) lon += 360.0;
    return lon;
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
    validate(a);
    validate(b);
    const double phi1 = to_radians(a.lat);
    const double phi2 = to_radians(b.lat);
    const double dphi = phi2 - phi1;
    const double dlambda = to_radians(b.lon - a.lon);
    const double s_phi = std::sin(dphi / 2.0);
    const double s_lambda = std::sin(dlambda / 2.0);
    double h = s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lambda * s_lambda;
    h = std::min(1.0, h);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double haversine_path_length(std::span<const GeoPoint> points) {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        total += haversine_distance(points[i - 1], points[i]);
    }
    return total;
}

MercatorPoint mercator_forward(const GeoPoint& p) {
    require_mercator_domain(p.lat);
    if (!std::isfinite(p.lon)) throw Error(ErrorCode::invalid_input, "non-finite longitude");
    // asinh(tan phi) == ln tan(pi/4 + phi/2), exact at the equator.
    const double phi = to_radians(p.lat);
    return {kEarthRadiusKm * to_radians(p.lon), kEarthRadiusKm * std::asinh(std::tan(phi))};
}

GeoPoint mercator_inverse(const MercatorPoint& m) {
    if (!std::isfinite(m.mx) || !std::isfinite(m.my)) {
        throw Error(ErrorCode::invalid_input, "non-finite Mercator coordinate");
    }
    const double phi = std::atan(std::sinh(m.my / kEarthRadiusKm));
    return {to_degrees(phi), normalize_longitude(to_degrees(m.mx / kEarthRadiusKm))};
}

double mercator_scale_factor(double lat_deg) {
    require_mercator_domain(lat_deg);
    // cos(60 deg) is not exactly 0.5 in binary; 1/cos would miss 2.0 by an ulp.
    if (std::abs(lat_deg) == 60.0) return 2.0;
    return 1.0 / std::cos(to_radians(lat_deg));
}

double geodesic_polygon_area(std::span<const GeoPoint> vertices) {
    if (vertices.size() < 3) {
        throw Error(ErrorCode::invalid_input, "geodesic polygon needs at least 3 vertices");
    }
    for (const GeoPoint& v : vertices) validate(v);
    double sum = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const GeoPoint& p = vertices[i];
        const GeoPoint& q = vertices[(i + 1) % n];
        const double dlambda = longitude_step(to_radians(p.lon), to_radians(q.lon));
        sum += dlambda * (2.0 + std::sin(to_radians(p.lat)) + std::sin(to_radians(q.lat)));
    }
    return std::abs(sum) * kEarthRadiusKm * kEarthRadiusKm / 2.0;
}

double anomaly_ratio(double planar_value, double geodesic_value) {
    if (!std::isfinite(geodesic_value) || geodesic_value <= 0.0) {
        throw Error(ErrorCode::domain_error, "anomaly ratio needs a positive geodesic value");
    }
    if (!std::isfinite(planar_value)) {
        throw Error(ErrorCode::invalid_input, "non-finite planar value");
    }
    return planar_value / geodesic_value;
}

}  // namespace carto

#include "cartometry/geom.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cartometry/error.hpp"

namespace carto {
namespace {

double cross(const WorldPoint& o, const WorldPoint& a, const WorldPoint& b) noexcept {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orientation(const WorldPoint& o, const WorldPoint& a, const WorldPoint& b) noexcept {
    const double c = cross(o, a, b);
    return (c > 0.0) - (c < 0.0);
}

// q lies within the bounding box of segment p1-p2; only meaningful when collinear.
bool within_extent(const WorldPoint& p1, const WorldPoint& p2, const WorldPoint& q) noexcept {
    return std::min(p1.x, p2.x) <= q.x && q.x <= std::max(p1.x, p2.x) &&
           std::min(p1.y, p2.y) <= q.y && q.y <= std::max(p1.y, p2.y);
}

// Adjacent edges a-b and b-c fold back onto each other.
bool folds_back(const WorldPoint& a, const WorldPoint& b, const WorldPoint& c) noexcept {
    if (cross(b, a, c) != 0.0) return false;
    const double dot = (a.x - b.x) * (c.x - b.x) + (a.y - b.y) * (c.y - b.y);
    return dot > 0.0;
}

void check_finite(std::span<const WorldPoint> points) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
            throw Error(ErrorCode::invalid_input,
                        "non-finite coordinate at point " + std::to_string(i));
        }
    }
}

}  // namespace

bool coincident(const WorldPoint& a, const WorldPoint& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y) <= kCoincidenceTolerance;
}

Polyline::Polyline(std::vector<WorldPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw Error(ErrorCode::invalid_input, "polyline has no points");
    check_finite(points_);
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (coincident(points_[i - 1], points_[i])) {
            throw Error(ErrorCode::duplicate_point,
                        "point " + std::to_string(i) + " repeats its predecessor");
        }
    }
}

Polygon::Polygon(std::vector<WorldPoint> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) {
        throw Error(ErrorCode::invalid_input, "polygon needs at least 3 vertices, got " +
                                                  std::to_string(vertices_.size()));
    }
    check_finite(vertices_);
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (coincident(vertices_[i], vertices_[(i + 1) % n])) {
            throw Error(ErrorCode::duplicate_point,
                        "vertex " + std::to_string((i + 1) % n) + " repeats its predecessor");
        }
    }
}

Polygon Polygon::from_ring(std::vector<WorldPoint> ring) {
    if (ring.size() > 1 && coincident(ring.front(), ring.back())) ring.pop_back();
    return Polygon(std::move(ring));
}

double polyline_length(const Polyline& line) {
    const auto pts = line.points();
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        total += std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
    }
    return total;
}

double signed_area(const Polygon& poly) {
    // Coordinates are taken relative to the first vertex to limit cancellation.
    const auto v = poly.vertices();
    const WorldPoint origin = v.front();
    double twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const WorldPoint& p = v[i];
        const WorldPoint& q = v[(i + 1) % v.size()];
        twice += (p.x - origin.x) * (q.y - origin.y) - (q.x - origin.x) * (p.y - origin.y);
    }
    return 0.5 * twice;
}

double polygon_area(const Polygon& poly) { return std::abs(signed_area(poly)); }

BoundingBox bounding_box(std::span<const WorldPoint> points) {
    if (points.empty()) throw Error(ErrorCode::invalid_input, "bounding box of no points");
    auto [min_x, max_x] = std::minmax_element(points.begin(), points.end(),
        [](const WorldPoint& a, const WorldPoint& b) { return a.x < b.x; });
    auto [min_y, max_y] = std::minmax_element(points.begin(), points.end(),
        [](const WorldPoint& a, const WorldPoint& b) { return a.y < b.y; });
    BoundingBox box;
    box.min_x = min_x->x;
    box.min_y = min_y->y;
    box.width = max_x->x - min_x->x;
    box.height = max_y->y - min_y->y;
    box.area = box.width * box.height;
    return box;
}

bool segments_intersect(const WorldPoint& p1, const WorldPoint& p2,
                        const WorldPoint& q1, const WorldPoint& q2) noexcept {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && within_extent(p1, p2, q1)) return true;
    if (o2 == 0 && within_extent(p1, p2, q2)) return true;
    if (o3 == 0 && within_extent(q1, q2, p1)) return true;
    if (o4 == 0 && within_extent(q1, q2, p2)) return true;
    return false;
}

bool is_simple(const Polygon& poly) {
    const auto v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        // Edge i runs v[i] -> v[i+1]; its successor shares v[i+1].
        if (folds_back(v[i], v[(i + 1) % n], v[(i + 2) % n])) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent through the closing vertex
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
        }
    }
    return true;
}

bool is_simple(const Polyline& line) {
    const auto p = line.points();
    const std::size_t segments = p.size() - 1;
    for (std::size_t i = 0; i + 1 < segments; ++i) {
        if (folds_back(p[i], p[i + 1], p[i + 2])) return false;
    }
    for (std::size_t i = 0; i < segments; ++i) {
        for (std::size_t j = i + 2; j < segments; ++j) {
            if (segments_intersect(p[i], p[i + 1], p[j], p[j + 1])) return false;
        }
    }
    return true;
}

}  // namespace carto

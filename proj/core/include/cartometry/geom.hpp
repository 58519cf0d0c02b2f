#pragma once

#include <span>
#include <vector>

namespace carto {

/// Calibrated planar coordinates in kilometers: x east, y north.
struct WorldPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

// Two consecutive points closer than this are the same point.
inline constexpr double kCoincidenceTolerance = 1e-12;

bool coincident(const WorldPoint& a, const WorldPoint& b) noexcept;

/// Open polyline (a traced route). Holds at least one point and never two
/// coincident consecutive points.
class Polyline {
public:
    explicit Polyline(std::vector<WorldPoint> points);

    std::span<const WorldPoint> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }

private:
    std::vector<WorldPoint> points_;
};

/// Closed polygon (a traced region). The first vertex is not repeated at
/// the end; at least three vertices; no coincident neighbours, including
/// the closing pair.
class Polygon {
public:
    explicit Polygon(std::vector<WorldPoint> vertices);

    // Accepts rings whose last vertex repeats the first and strips it.
    static Polygon from_ring(std::vector<WorldPoint> ring);

    std::span<const WorldPoint> vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }

private:
    std::vector<WorldPoint> vertices_;
};

struct BoundingBox {
    double min_x = 0.0;
    double min_y = 0.0;
    double width = 0.0;
    double height = 0.0;
    double area = 0.0;
};

double polyline_length(const Polyline& line);

// Shoelace sum, positive for counter-clockwise vertex order.
double signed_area(const Polygon& poly);

// |signed_area|. Self-intersecting polygons are accepted; check is_simple.
double polygon_area(const Polygon& poly);

BoundingBox bounding_box(std::span<const WorldPoint> points);

// True iff no two non-adjacent edges touch and no adjacent edges fold back
// over each other.
bool is_simple(const Polygon& poly);

// Same test for an open chain: non-adjacent segments must not touch.
bool is_simple(const Polyline& line);

// Closed-segment intersection, collinear overlaps included.
bool segments_intersect(const WorldPoint& p1, const WorldPoint& p2,
                        const WorldPoint& q1, const WorldPoint& q2) noexcept;

}  // namespace carto

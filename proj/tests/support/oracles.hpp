#pragma once

// Independent reference computations for the test suites. Nothing here
// calls into the library's geometry or fitting code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cartometry/boundary_fit.hpp"
#include "cartometry/geodesy.hpp"
#include "cartometry/geom.hpp"

namespace carto::oracle {

inline double distance(const WorldPoint& a, const WorldPoint& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
}

// Heron's formula, so no cross products are shared with the shoelace sum.
inline double heron_area(const WorldPoint& a, const WorldPoint& b, const WorldPoint& c) {
    double s[3] = {distance(a, b), distance(b, c), distance(c, a)};
    std::sort(s, s + 3, std::greater<>());
    const double x = s[0], y = s[1], z = s[2];
    // Kahan's numerically stable arrangement.
    const double p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    return 0.25 * std::sqrt(std::max(0.0, p));
}

inline double orient(const WorldPoint& o, const WorldPoint& a, const WorldPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool point_in_triangle(const WorldPoint& p, const WorldPoint& a, const WorldPoint& b,
                              const WorldPoint& c) {
    const double d1 = orient(a, b, p), d2 = orient(b, c, p), d3 = orient(c, a, p);
    const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(neg && pos);
}

/// Ear-clipping triangulation of a simple polygon; returns the summed
/// Heron areas of the ears.
inline double triangulated_area(std::vector<WorldPoint> v) {
    double signed_twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        signed_twice += orient(v[0], v[i], v[(i + 1) % v.size()]);
    }
    if (signed_twice < 0) std::reverse(v.begin(), v.end());
    double total = 0.0;
    std::size_t guard = 0;
    while (v.size() > 3 && guard++ < 100000) {
        const std::size_t n = v.size();
        bool clipped = false;
        for (std::size_t i = 0; i < n; ++i) {
            const WorldPoint& a = v[(i + n - 1) % n];
            const WorldPoint& b = v[i];
            const WorldPoint& c = v[(i + 1) % n];
            if (orient(a, b, c) <= 0) continue;
            bool empty = true;
            for (std::size_t k = 0; k < n && empty; ++k) {
                if (k == i || k == (i + 1) % n || k == (i + n - 1) % n) continue;
                if (point_in_triangle(v[k], a, b, c)) empty = false;
            }
            if (!empty) continue;
            total += heron_area(a, b, c);
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped) return std::nan("");
    }
    return total + heron_area(v[0], v[1], v[2]);
}

/// Star-shaped (hence simple) polygon around (cx, cy): sorted distinct
/// angles with every angular gap below pi, random radii.
inline std::vector<WorldPoint> random_star_polygon(std::mt19937_64& rng, std::size_t n,
                                                   double cx = 0.0, double cy = 0.0,
                                                   double r_min = 0.5, double r_max = 5.0) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> radius(r_min, r_max);
    std::vector<double> angles;
    while (true) {
        angles.assign(n, 0.0);
        for (auto& a : angles) a = angle(rng);
        std::sort(angles.begin(), angles.end());
        angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
        double max_gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
        for (std::size_t i = 1; i < angles.size(); ++i) {
            max_gap = std::max(max_gap, angles[i] - angles[i - 1]);
        }
        if (angles.size() >= 3 && max_gap < 0.95 * std::numbers::pi) break;
    }
    std::vector<WorldPoint> pts;
    for (double a : angles) {
        const double r = radius(rng);
        pts.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    return pts;
}

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
inline std::vector<WorldPoint> convex_hull(std::vector<WorldPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const WorldPoint& a, const WorldPoint& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<WorldPoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

// Central angle from the spherical law of cosines.
inline double law_of_cosines_distance(const GeoPoint& a, const GeoPoint& b) {
    const double d2r = std::numbers::pi / 180.0;
    const double c = std::sin(a.lat * d2r) * std::sin(b.lat * d2r) +
                     std::cos(a.lat * d2r) * std::cos(b.lat * d2r) * std::cos((b.lon - a.lon) * d2r);
    return kEarthRadiusKm * std::acos(std::clamp(c, -1.0, 1.0));
}

// Series evaluation written out independently of FourierBoundary::evaluate.
inline void series_point(const FourierBoundary& fb, double t, double& x, double& y) {
    x = fb.a0;
    y = fb.c0;
    for (std::size_t k = 0; k < fb.a.size(); ++k) {
        const double w = static_cast<double>(k + 1);
        x += fb.a[k] * std::cos(w * t) + fb.b[k] * std::sin(w * t);
        y += fb.c[k] * std::cos(w * t) + fb.d[k] * std::sin(w * t);
    }
}

/// |1/2 closed-integral (x dy - y dx)| by the periodic trapezoid rule with
/// central-difference derivatives.
inline double green_quadrature_area(const FourierBoundary& fb, int samples = 10000) {
    const double h = 2.0 * std::numbers::pi / samples;
    const double eps = 1e-5;
    double sum = 0.0;
    for (int j = 0; j < samples; ++j) {
        const double t = j * h;
        double x, y, xp, yp, xm, ym;
        series_point(fb, t, x, y);
        series_point(fb, t + eps, xp, yp);
        series_point(fb, t - eps, xm, ym);
        const double dx = (xp - xm) / (2 * eps);
        const double dy = (yp - ym) / (2 * eps);
        sum += x * dy - y * dx;
    }
    return std::abs(0.5 * sum * h);
}

inline FourierBoundary random_boundary(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    FourierBoundary fb;
    fb.a0 = 10.0 * coeff(rng);
    fb.c0 = 10.0 * coeff(rng);
    for (int k = 1; k <= n; ++k) {
        const double decay = 1.0 / (k * k);
        fb.a.push_back(decay * coeff(rng) + (k == 1 ? 3.0 : 0.0));
        fb.b.push_back(decay * coeff(rng));
        fb.c.push_back(decay * coeff(rng));
        fb.d.push_back(decay * coeff(rng) + (k == 1 ? 2.0 : 0.0));
    }
    return fb;
}

// Smooth star-shaped contour r(theta) = base + sum of a few low-order waves,
// sampled at uneven angles.
inline std::vector<WorldPoint> smooth_contour(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> amp(-0.3, 0.3);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    const double a2 = amp(rng), a3 = amp(rng), p2 = 3.0 * amp(rng), p3 = 3.0 * amp(rng);
    std::vector<WorldPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = 2.0 * std::numbers::pi * (static_cast<double>(i) + jitter(rng)) /
                             static_cast<double>(n);
        const double r = 3.0 + a2 * std::cos(2 * theta + p2) + a3 * std::cos(3 * theta + p3);
        pts.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
    return pts;
}

}  // namespace carto::oracle

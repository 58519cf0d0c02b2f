#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cartometry/geodesy.hpp"
#include "cartometry/geom.hpp"

namespace carto {

/// Image-space position: u to the right, v downwards, in pixels.
struct PixelPoint {
    double u = 0.0;
    double v = 0.0;

    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

/// A location known in both the image and the world. Georeferenced control
/// points carry a GeoPoint and are fitted in Web Mercator kilometers.
struct ControlPoint {
    PixelPoint pixel;
    std::variant<WorldPoint, GeoPoint> target;
    std::string label;

    bool georeferenced() const noexcept { return std::holds_alternative<GeoPoint>(target); }
    friend bool operator==(const ControlPoint&, const ControlPoint&) = default;
};

// Planar target of a control point (Mercator-projected when geographic).
WorldPoint planar_target(const ControlPoint& cp);

enum class TransformKind { similarity, affine };

/**
 * Pixel to world map.
 *
 * Similarity: world = s * R(theta) * F * pixel + t, where F = diag(1, -1)
 * when flip_v is set so that image "down" becomes world "south".
 * Coefficients are {s, theta, tx, ty}.
 *
 * Affine: x = a*u + b*v + e, y = c*u + d*v + f on raw pixel coordinates.
 * Coefficients are {a, b, c, d, e, f}.
 */
class CalibrationTransform {
public:
    static CalibrationTransform similarity(double scale, double rotation, double tx, double ty,
                                           bool flip_v = true);
    // Singular matrices are accepted here; invert() rejects them.
    static CalibrationTransform affine(double a, double b, double c, double d, double e,
                                       double f);
    static CalibrationTransform identity() { return similarity(1.0, 0.0, 0.0, 0.0); }

    TransformKind kind() const noexcept { return kind_; }
    bool flip_v() const noexcept { return flip_v_; }
    std::vector<double> coefficients() const;

    double rms_residual() const noexcept { return rms_residual_; }
    CalibrationTransform with_residual(double rms) const;

    // Linear part and offset, x' = m[0]*u + m[1]*v + m[4], y' = m[2]*u + m[3]*v + m[5].
    std::array<double, 6> matrix() const noexcept;
    double determinant() const noexcept;

    friend bool operator==(const CalibrationTransform&, const CalibrationTransform&) = default;

private:
    CalibrationTransform() = default;

    TransformKind kind_ = TransformKind::similarity;
    bool flip_v_ = true;
    std::array<double, 6> params_{};  // similarity uses the first four
    double rms_residual_ = 0.0;
};

CalibrationTransform fit_similarity(std::span<const ControlPoint> pairs);
CalibrationTransform fit_affine(std::span<const ControlPoint> pairs);

WorldPoint apply(const CalibrationTransform& t, const PixelPoint& p);

// The inverse maps world back to pixels; read its input as (x, y) and its
// output as (u, v). Use to_pixel() for the typed form.
CalibrationTransform invert(const CalibrationTransform& t);
PixelPoint to_pixel(const CalibrationTransform& t, const WorldPoint& w);

double rms_residual(const CalibrationTransform& t, std::span<const ControlPoint> pairs);

// Length of the image diagonal in world km under `t`.
double world_diagonal(const CalibrationTransform& t, double width_px, double height_px);

// Residuals above this fraction of the world diagonal are worth a warning.
inline constexpr double kResidualWarningFraction = 0.005;

}  // namespace carto

#include "cartometry/calibration.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "cartometry/error.hpp"

namespace carto {
namespace {

struct Normalization {
    double cu = 0.0;
    double cv = 0.0;
    double scale = 0.0;  // RMS distance from the centroid
};

Normalization normalization_of(std::span<const PixelPoint> pixels) {
    Normalization n;
    for (const auto& p : pixels) {
        n.cu += p.u;
        n.cv += p.v;
    }
    const double count = static_cast<double>(pixels.size());
    n.cu /= count;
    n.cv /= count;
    double sq = 0.0;
    for (const auto& p : pixels) sq += (p.u - n.cu) * (p.u - n.cu) + (p.v - n.cv) * (p.v - n.cv);
    n.scale = std::sqrt(sq / count);
    return n;
}

void check_pairs(std::span<const ControlPoint> pairs, std::size_t minimum) {
    if (pairs.size() < minimum) {
        throw Error(ErrorCode::insufficient_data,
                    "insufficient control points: need at least " + std::to_string(minimum) +
                        ", got " + std::to_string(pairs.size()));
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& cp = pairs[i];
        if (!std::isfinite(cp.pixel.u) || !std::isfinite(cp.pixel.v)) {
            throw Error(ErrorCode::invalid_input,
                        "non-finite pixel coordinate in control point " + std::to_string(i));
        }
        if (cp.georeferenced() != pairs.front().georeferenced()) {
            throw Error(ErrorCode::invalid_input,
                        "control points mix geographic and planar targets");
        }
    }
}

}  // namespace

WorldPoint planar_target(const ControlPoint& cp) {
    if (const auto* geo = std::get_if<GeoPoint>(&cp.target)) {
        validate(*geo);
        const MercatorPoint m = mercator_forward(*geo);
        return {m.mx, m.my};
    }
    const auto& w = std::get<WorldPoint>(cp.target);
    if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
        throw Error(ErrorCode::invalid_input, "non-finite world coordinate");
    }
    return w;
}

CalibrationTransform CalibrationTransform::similarity(double scale, double rotation, double tx,
                                                      double ty, bool flip_v) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw Error(ErrorCode::invalid_input, "similarity scale must be positive and finite");
    }
    if (!std::isfinite(rotation) || !std::isfinite(tx) || !std::isfinite(ty)) {
        throw Error(ErrorCode::invalid_input, "non-finite similarity coefficient");
    }
    CalibrationTransform t;
    t.kind_ = TransformKind::similarity;
    t.flip_v_ = flip_v;
    t.params_ = {scale, rotation, tx, ty, 0.0, 0.0};
    return t;
}

CalibrationTransform CalibrationTransform::affine(double a, double b, double c, double d,
                                                  double e, double f) {
    for (double x : {a, b, c, d, e, f}) {
        if (!std::isfinite(x)) throw Error(ErrorCode::invalid_input, "non-finite affine coefficient");
    }
    CalibrationTransform t;
    t.kind_ = TransformKind::affine;
    t.flip_v_ = false;
    t.params_ = {a, b, c, d, e, f};
    return t;
}

std::vector<double> CalibrationTransform::coefficients() const {
    if (kind_ == TransformKind::similarity) return {params_.begin(), params_.begin() + 4};
    return {params_.begin(), params_.end()};
}

CalibrationTransform CalibrationTransform::with_residual(double rms) const {
    CalibrationTransform t = *this;
    t.rms_residual_ = rms;
    return t;
}

std::array<double, 6> CalibrationTransform::matrix() const noexcept {
    if (kind_ == TransformKind::affine) return params_;
    const double s = params_[0];
    const double cos_t = std::cos(params_[1]);
    const double sin_t = std::sin(params_[1]);
    if (flip_v_) {
        return {s * cos_t, s * sin_t, s * sin_t, -s * cos_t, params_[2], params_[3]};
    }
    return {s * cos_t, -s * sin_t, s * sin_t, s * cos_t, params_[2], params_[3]};
}

double CalibrationTransform::determinant() const noexcept {
    if (kind_ == TransformKind::similarity) {
        const double s2 = params_[0] * params_[0];
        return flip_v_ ? -s2 : s2;
    }
    return params_[0] * params_[3] - params_[1] * params_[2];
}

CalibrationTransform fit_similarity(std::span<const ControlPoint> pairs) {
    check_pairs(pairs, 2);

    // Work in the flipped frame (u, -v) so the fit never needs a reflection.
    std::vector<PixelPoint> flipped;
    std::vector<WorldPoint> targets;
    flipped.reserve(pairs.size());
    targets.reserve(pairs.size());
    for (const auto& cp : pairs) {
        flipped.push_back({cp.pixel.u, -cp.pixel.v});
        targets.push_back(planar_target(cp));
    }

    const Normalization norm = normalization_of(flipped);
    if (!(norm.scale > 0.0)) {
        throw Error(ErrorCode::degenerate_configuration,
                    "degenerate configuration: control points share one pixel location");
    }

    double cx = 0.0, cy = 0.0;
    for (const auto& w : targets) {
        cx += w.x;
        cy += w.y;
    }
    const double count = static_cast<double>(pairs.size());
    cx /= count;
    cy /= count;

    // With centred, unit-RMS inputs the normal equations are diagonal.
    double num_a = 0.0, num_b = 0.0;
    for (std::size_t i = 0; i < flipped.size(); ++i) {
        const double qx = (flipped[i].u - norm.cu) / norm.scale;
        const double qy = (flipped[i].v - norm.cv) / norm.scale;
        const double wx = targets[i].x - cx;
        const double wy = targets[i].y - cy;
        num_a += qx * wx + qy * wy;
        num_b += qx * wy - qy * wx;
    }
    const double a = num_a / count / norm.scale;
    const double b = num_b / count / norm.scale;
    const double scale = std::hypot(a, b);
    if (!(scale > 0.0)) {
        throw Error(ErrorCode::degenerate_configuration,
                    "degenerate configuration: control points share one world location");
    }
    const double tx = cx - (a * norm.cu - b * norm.cv);
    const double ty = cy - (b * norm.cu + a * norm.cv);

    const auto t = CalibrationTransform::similarity(scale, std::atan2(b, a), tx, ty, true);
    return t.with_residual(rms_residual(t, pairs));
}

CalibrationTransform fit_affine(std::span<const ControlPoint> pairs) {
    check_pairs(pairs, 3);

    std::vector<PixelPoint> pixels;
    pixels.reserve(pairs.size());
    for (const auto& cp : pairs) pixels.push_back(cp.pixel);

    // Largest triangle spanned by the first pixel and the one farthest from it.
    std::size_t far = 0;
    double far_d = -1.0;
    for (std::size_t i = 1; i < pixels.size(); ++i) {
        const double d = std::hypot(pixels[i].u - pixels[0].u, pixels[i].v - pixels[0].v);
        if (d > far_d) {
            far_d = d;
            far = i;
        }
    }
    double max_area = 0.0;
    for (const auto& p : pixels) {
        const double area = 0.5 * std::abs((pixels[far].u - pixels[0].u) * (p.v - pixels[0].v) -
                                           (pixels[far].v - pixels[0].v) * (p.u - pixels[0].u));
        max_area = std::max(max_area, area);
    }
    if (!(max_area > 1e-9)) {
        throw Error(ErrorCode::degenerate_configuration,
                    "degenerate configuration: control point pixels are collinear");
    }

    const Normalization norm = normalization_of(pixels);
    const auto rows = static_cast<Eigen::Index>(pairs.size());
    Eigen::MatrixXd design(rows, 3);
    Eigen::MatrixXd rhs(rows, 2);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& p = pixels[static_cast<std::size_t>(i)];
        design(i, 0) = (p.u - norm.cu) / norm.scale;
        design(i, 1) = (p.v - norm.cv) / norm.scale;
        design(i, 2) = 1.0;
        const WorldPoint w = planar_target(pairs[static_cast<std::size_t>(i)]);
        rhs(i, 0) = w.x;
        rhs(i, 1) = w.y;
    }
    const Eigen::MatrixXd sol = design.colPivHouseholderQr().solve(rhs);

    const double a = sol(0, 0) / norm.scale;
    const double b = sol(1, 0) / norm.scale;
    const double c = sol(0, 1) / norm.scale;
    const double d = sol(1, 1) / norm.scale;
    const double e = sol(2, 0) - a * norm.cu - b * norm.cv;
    const double f = sol(2, 1) - c * norm.cu - d * norm.cv;

    const auto t = CalibrationTransform::affine(a, b, c, d, e, f);
    return t.with_residual(rms_residual(t, pairs));
}

WorldPoint apply(const CalibrationTransform& t, const PixelPoint& p) {
    const auto m = t.matrix();
    return {m[0] * p.u + m[1] * p.v + m[4], m[2] * p.u + m[3] * p.v + m[5]};
}

CalibrationTransform invert(const CalibrationTransform& t) {
    const auto coeff = t.coefficients();
    if (t.kind() == TransformKind::similarity) {
        const double s = coeff[0];
        const double theta = coeff[1];
        const double cos_t = std::cos(theta);
        const double sin_t = std::sin(theta);
        const double tx = coeff[2];
        const double ty = coeff[3];
        if (t.flip_v()) {
            // (s R F)^-1 = (1/s) F R(-theta) = (1/s) R(theta) F
            return CalibrationTransform::similarity(1.0 / s, theta,
                                                    -(cos_t * tx + sin_t * ty) / s,
                                                    -(sin_t * tx - cos_t * ty) / s, true);
        }
        return CalibrationTransform::similarity(1.0 / s, -theta,
                                                -(cos_t * tx + sin_t * ty) / s,
                                                -(-sin_t * tx + cos_t * ty) / s, false);
    }
    const double a = coeff[0], b = coeff[1], c = coeff[2], d = coeff[3];
    const double det = a * d - b * c;
    const double magnitude = (std::abs(a) + std::abs(b)) * (std::abs(c) + std::abs(d));
    if (!(std::abs(det) > 1e-14 * magnitude) || !std::isfinite(det)) {
        throw Error(ErrorCode::non_invertible, "transform is singular");
    }
    const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
    const double e = coeff[4], f = coeff[5];
    return CalibrationTransform::affine(ia, ib, ic, id, -(ia * e + ib * f), -(ic * e + id * f));
}

PixelPoint to_pixel(const CalibrationTransform& t, const WorldPoint& w) {
    const WorldPoint p = apply(invert(t), PixelPoint{w.x, w.y});
    return {p.x, p.y};
}

double rms_residual(const CalibrationTransform& t, std::span<const ControlPoint> pairs) {
    if (pairs.empty()) throw Error(ErrorCode::invalid_input, "residual of no control points");
    double sq = 0.0;
    for (const auto& cp : pairs) {
        const WorldPoint fitted = apply(t, cp.pixel);
        const WorldPoint target = planar_target(cp);
        const double dx = fitted.x - target.x;
        const double dy = fitted.y - target.y;
        sq += dx * dx + dy * dy;
    }
    return std::sqrt(sq / static_cast<double>(pairs.size()));
}

double world_diagonal(const CalibrationTransform& t, double width_px, double height_px) {
    const WorldPoint a = apply(t, {0.0, 0.0});
    const WorldPoint b = apply(t, {width_px, height_px});
    return std::hypot(b.x - a.x, b.y - a.y);
}

}  // namespace carto

#include "cartometry/boundary_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cartometry/error.hpp"

namespace carto {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

WorldPoint FourierBoundary::evaluate(double t) const noexcept {
    double x = a0;
    double y = c0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double kt = static_cast<double>(k + 1) * t;
        const double ck = std::cos(kt);
        const double sk = std::sin(kt);
        x += a[k] * ck + b[k] * sk;
        y += c[k] * ck + d[k] * sk;
    }
    return {x, y};
}

void FourierBoundary::validate() const {
    if (a.empty()) throw Error(ErrorCode::invalid_input, "boundary needs at least one harmonic");
    if (b.size() != a.size() || c.size() != a.size() || d.size() != a.size()) {
        throw Error(ErrorCode::invalid_input, "coefficient arrays differ in length");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(a0) || !finite(c0) || !std::all_of(a.begin(), a.end(), finite) ||
        !std::all_of(b.begin(), b.end(), finite) || !std::all_of(c.begin(), c.end(), finite) ||
        !std::all_of(d.begin(), d.end(), finite)) {
        throw Error(ErrorCode::invalid_input, "non-finite boundary coefficient");
    }
}

std::vector<double> chord_length_parameters(const Polygon& vertices) {
    const auto v = vertices.vertices();
    const std::size_t n = v.size();
    std::vector<double> cumulative(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        cumulative[i] = cumulative[i - 1] + std::hypot(v[i].x - v[i - 1].x, v[i].y - v[i - 1].y);
    }
    const double perimeter =
        cumulative.back() + std::hypot(v.front().x - v.back().x, v.front().y - v.back().y);
    if (!(perimeter > 0.0)) throw Error(ErrorCode::degenerate_configuration, "zero perimeter");
    for (double& t : cumulative) t = kTwoPi * t / perimeter;
    return cumulative;
}

int max_harmonics(std::size_t vertex_count) noexcept {
    if (vertex_count < 3) return 0;
    return static_cast<int>((vertex_count - 1) / 2);
}

int default_harmonics(std::size_t vertex_count) noexcept {
    return std::max(1, std::min(8, static_cast<int>(vertex_count / 4)));
}

FitReport fit_fourier_boundary(const Polygon& vertices, int n) {
    if (n < 1) throw Error(ErrorCode::invalid_input, "harmonic count must be at least 1");
    const std::size_t count = vertices.size();
    const std::size_t needed = std::max<std::size_t>(3, 2 * static_cast<std::size_t>(n) + 1);
    if (count < needed) {
        throw Error(ErrorCode::insufficient_data,
                    std::to_string(n) + " harmonics need at least " + std::to_string(needed) +
                        " vertices, got " + std::to_string(count));
    }
    const std::vector<double> t = chord_length_parameters(vertices);
    const auto v = vertices.vertices();

    const auto rows = static_cast<Eigen::Index>(count);
    const Eigen::Index cols = 2 * n + 1;
    Eigen::MatrixXd design(rows, cols);
    Eigen::MatrixXd rhs(rows, 2);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double ti = t[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        for (int k = 1; k <= n; ++k) {
            design(i, 2 * k - 1) = std::cos(k * ti);
            design(i, 2 * k) = std::sin(k * ti);
        }
        rhs(i, 0) = v[static_cast<std::size_t>(i)].x;
        rhs(i, 1) = v[static_cast<std::size_t>(i)].y;
    }
    const Eigen::MatrixXd sol = design.colPivHouseholderQr().solve(rhs);

    FitReport report;
    FourierBoundary& fb = report.boundary;
    fb.a0 = sol(0, 0);
    fb.c0 = sol(0, 1);
    for (int k = 1; k <= n; ++k) {
        fb.a.push_back(sol(2 * k - 1, 0));
        fb.b.push_back(sol(2 * k, 0));
        fb.c.push_back(sol(2 * k - 1, 1));
        fb.d.push_back(sol(2 * k, 1));
    }

    double sq = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const WorldPoint on_curve = fb.evaluate(t[i]);
        sq += (on_curve.x - v[i].x) * (on_curve.x - v[i].x) +
              (on_curve.y - v[i].y) * (on_curve.y - v[i].y);
    }
    report.rms_error = std::sqrt(sq / static_cast<double>(count));
    report.area = fourier_area(fb);
    return report;
}

double fourier_area(const FourierBoundary& boundary) {
    boundary.validate();
    double sum = 0.0;
    for (std::size_t k = 0; k < boundary.a.size(); ++k) {
        sum += static_cast<double>(k + 1) *
               (boundary.a[k] * boundary.d[k] - boundary.b[k] * boundary.c[k]);
    }
    return std::abs(std::numbers::pi * sum);
}

std::vector<WorldPoint> sample_boundary(const FourierBoundary& boundary, int m) {
    if (m < 3) throw Error(ErrorCode::invalid_input, "sample count must be at least 3");
    boundary.validate();
    std::vector<WorldPoint> samples;
    samples.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        // Written as (2*pi*j)/m so that grid m nests exactly inside grid 2m.
        samples.push_back(boundary.evaluate(kTwoPi * j / m));
    }
    return samples;
}

std::vector<ErrorCurvePoint> fit_error_curve(const Polygon& vertices, int n_max) {
    if (n_max < 1) throw Error(ErrorCode::invalid_input, "n_max must be at least 1");
    const int cap = std::min(n_max, max_harmonics(vertices.size()));
    std::vector<ErrorCurvePoint> curve;
    for (int n = 1; n <= cap; ++n) {
        const FitReport r = fit_fourier_boundary(vertices, n);
        curve.push_back({n, r.rms_error, r.area});
    }
    return curve;
}

}  // namespace carto

#pragma once

#include <vector>

#include "cartometry/geom.hpp"

namespace carto {

/**
 * Closed curve as a truncated trigonometric series, t in [0, 2*pi):
 *
 *   x(t) = a0 + sum_k (a[k] cos kt + b[k] sin kt)
 *   y(t) = c0 + sum_k (c[k] cos kt + d[k] sin kt)
 *
 * Index k-1 of each coefficient vector holds harmonic k.
 */
struct FourierBoundary {
    double a0 = 0.0;
    double c0 = 0.0;
    std::vector<double> a, b, c, d;

    int harmonics() const noexcept { return static_cast<int>(a.size()); }
    WorldPoint evaluate(double t) const noexcept;
    // Throws invalid_input when the coefficient vectors disagree or hold non-finite values.
    void validate() const;
};

struct FitReport {
    FourierBoundary boundary;
    double rms_error = 0.0;  // km
    double area = 0.0;       // km^2
};

struct ErrorCurvePoint {
    int n = 0;
    double rms_error = 0.0;
    double area = 0.0;
};

// Chord-length parameters t_i in [0, 2*pi) for a closed vertex ring.
std::vector<double> chord_length_parameters(const Polygon& vertices);

// Least-squares fit with n harmonics. Needs at least max(3, 2n+1) vertices.
FitReport fit_fourier_boundary(const Polygon& vertices, int n);

// min(8, vertices/4), at least 1.
int default_harmonics(std::size_t vertex_count) noexcept;

// Largest n the vertex count supports.
int max_harmonics(std::size_t vertex_count) noexcept;

// Closed-form enclosed area via Green's theorem; orientation-free.
double fourier_area(const FourierBoundary& boundary);

std::vector<WorldPoint> sample_boundary(const FourierBoundary& boundary, int m);

// Fits for n = 1..n_max, stopping early where the vertex count runs out.
std::vector<ErrorCurvePoint> fit_error_curve(const Polygon& vertices, int n_max);

}  // namespace carto

#pragma once

#include "gpdf/io.hpp"

#include <cmath>
#include <random>

namespace gpdf::testutil {

inline PointCloud circle_cloud(std::size_t n = 256, double radius = 1.0,
                               double cx = 0.0, double cy = 0.0) {
    PointCloud c;
    c.dim = 2;
    c.source_id = "circle";
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        c.points.emplace_back(cx + radius * std::cos(a), cy + radius * std::sin(a), 0.0);
    }
    return c;
}

// Fibonacci lattice: deterministic, near-uniform.
inline PointCloud sphere_cloud(std::size_t n = 1000, double radius = 1.0) {
    PointCloud c;
    c.dim = 3;
    c.source_id = "sphere";
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = ga * static_cast<double>(i);
        c.points.emplace_back(radius * r * std::cos(a), radius * r * std::sin(a),
                              radius * z);
    }
    return c;
}

// Two perpendicular walls meeting at the origin.
inline PointCloud l_shape_cloud(std::size_t n = 300) {
    PointCloud c;
    c.dim = 2;
    c.source_id = "l-shape";
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const double t = 2.0 * static_cast<double>(i) / static_cast<double>(half - 1);
        c.points.emplace_back(t, 0.0, 0.0);
    }
    for (std::size_t i = 0; i < n - half; ++i) {
        const double t = 2.0 * static_cast<double>(i) / static_cast<double>(n - half - 1);
        c.points.emplace_back(0.0, t, 0.0);
    }
    return c;
}

inline double band_rmse(const Field& field, const PointCloud& cloud, double cell,
                        double band_lo, double band_hi, double extent = 1.6) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double y = -extent; y <= extent; y += cell) {
        for (double x = -extent; x <= extent; x += cell) {
            const Vec3 q{x, y, 0.0};
            const double dt = brute_force_edf(cloud, q);
            if (dt < band_lo || dt > band_hi) continue;
            const double e = field.query_distance(q) - dt;
            sum += e * e;
            ++count;
        }
    }
    return std::sqrt(sum / static_cast<double>(count));
}

}  // namespace gpdf::testutil

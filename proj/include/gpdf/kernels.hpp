#pragma once

#include "gpdf/common.hpp"

namespace gpdf {

enum class KernelFamily { Matern12, Matern32, SquaredExponential };

struct KernelSpec {
    KernelFamily family = KernelFamily::SquaredExponential;
    double length_scale = 1.0;     // l > 0, meters
    double signal_variance = 1.0;  // sigma^2 > 0
    double loggpis_rate = 1.0;     // lambda > 0, 1/meters (Log-GPIS only)

    void validate() const;
};

// Stationary covariance k(a, b). Value in (0, sigma^2], equals sigma^2 iff a == b.
double kernel_eval(const KernelSpec& spec, const Vec3& a, const Vec3& b, int dim);

// Scalar form k(r) for separation r >= 0.
double kernel_of_distance(const KernelSpec& spec, double r);

// Gradient of kernel_eval w.r.t. its first argument. Matern12 at a == b
// returns the zero vector (the true gradient is undefined there).
Vec3 kernel_grad_x(const KernelSpec& spec, const Vec3& a, const Vec3& b, int dim);

struct RevertResult {
    double distance = 0.0;    // meters, >= 0
    double derivative = 0.0;  // d(distance)/d(occupancy), meters
};

// Occupancy floor: occupancies below this are clamped before inversion.
inline double occupancy_floor(const KernelSpec& spec) {
    return 1e-12 * spec.signal_variance;
}

// Inverse of kernel_of_distance: maps an occupancy value back to metric
// distance, with the inverse-function derivative. o >= sigma^2 clamps to
// distance 0 with derivative 0; o below the floor is clamped to the floor.
RevertResult reverting_distance(const KernelSpec& spec, double occupancy);

}  // namespace gpdf

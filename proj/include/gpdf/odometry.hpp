#pragma once

#include "gpdf/field.hpp"
#include "gpdf/pose.hpp"
#include "gpdf/submap.hpp"

#include <functional>

namespace gpdf {

// Distance + gradient + validity at a query point, the surface the
// registration and planning code consumes. Wraps either a Field or a
// SubmapGrid.
using DistanceQueryFn = std::function<double(const Vec3& q, Vec3* grad, bool* valid)>;

DistanceQueryFn query_fn(const Field& field);
DistanceQueryFn query_fn(SubmapGrid& grid);

struct RegisterOptions {
    int max_iters = 50;
    double step_tol = 1e-8;       // terminate when |delta xi| drops below
    double huber_delta = 0.1;     // meters
    double init_damping = 1e-4;   // Levenberg lambda
};

struct RegistrationReport {
    Pose pose;
    int iterations = 0;
    double initial_rmse = 0.0;
    double final_rmse = 0.0;
    bool converged = false;
    double inlier_fraction = 0.0;
};

// Damped Gauss-Newton on r_i = d(T p_i) with Huber loss and left
// multiplicative pose increments. Returns the map-from-scan pose:
// applying it to scan points minimizes field distance.
RegistrationReport register_scan(const DistanceQueryFn& field, int dim,
                                 const PointCloud& scan, const Pose& init,
                                 const RegisterOptions& opts = {});

RegistrationReport register_scan(const Field& field, const PointCloud& scan,
                                 const Pose& init, const RegisterOptions& opts = {});
RegistrationReport register_scan(SubmapGrid& grid, const PointCloud& scan,
                                 const Pose& init, const RegisterOptions& opts = {});

}  // namespace gpdf

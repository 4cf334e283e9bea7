#pragma once

#include "gpdf/odometry.hpp"

namespace gpdf {

struct Trajectory {
    std::vector<Vec3> waypoints;  // first/last equal start/goal exactly
    bool fixed_endpoints = true;
    int dim = 2;
};

struct PlanConfig {
    int num_waypoints = 50;       // M >= 3
    double safety_margin = 0.2;   // epsilon, meters
    double smoothness_weight = 1.0;
    double obstacle_weight = 10.0;
    double step = 0.05;           // eta
    int max_iters = 500;
    double cost_tol = 1e-6;

    void validate() const;
};

struct PlanResult {
    Trajectory trajectory;
    std::vector<double> cost_history;  // non-increasing over accepted steps
};

// Gradient descent on smoothness + hinge-squared obstacle cost, field
// gradient as the repulsive direction. Endpoints never move.
PlanResult plan_path(const DistanceQueryFn& field, int dim, const Vec3& start,
                     const Vec3& goal, const PlanConfig& cfg);
PlanResult plan_path(const Field& field, const Vec3& start, const Vec3& goal,
                     const PlanConfig& cfg);

// Minimum field distance over waypoints and segment midpoints.
double path_clearance(const DistanceQueryFn& field, const Trajectory& traj);
double path_clearance(const Field& field, const Trajectory& traj);

}  // namespace gpdf

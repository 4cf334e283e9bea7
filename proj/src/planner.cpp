#include "gpdf/planner.hpp"

#include <cmath>

namespace gpdf {

void PlanConfig::validate() const {
    if (num_waypoints < 3) throw UsageError("num_waypoints must be >= 3");
    if (!(safety_margin > 0.0)) throw UsageError("safety_margin must be > 0");
    if (!(smoothness_weight > 0.0) || !(obstacle_weight > 0.0))
        throw UsageError("cost weights must be > 0");
    if (!(step > 0.0) || max_iters < 1 || !(cost_tol > 0.0))
        throw UsageError("invalid descent parameters");
}

namespace {

double total_cost(const DistanceQueryFn& field, const std::vector<Vec3>& w,
                  const PlanConfig& cfg) {
    double smooth = 0.0;
    for (std::size_t k = 1; k + 1 < w.size(); ++k)
        smooth += (w[k + 1] - 2.0 * w[k] + w[k - 1]).squaredNorm();
    double obst = 0.0;
    for (const Vec3& p : w) {
        const double d = field(p, nullptr, nullptr);
        if (d < cfg.safety_margin) {
            const double h = cfg.safety_margin - d;
            obst += h * h;
        }
    }
    return cfg.smoothness_weight * smooth + cfg.obstacle_weight * obst;
}

// Straight line start->goal; if it enters the collision margin, bow it
// sideways with growing amplitude until the initial guess is clear.
// An unsigned field offers no inside/outside cue, so descent from the
// straight line can pinch the path through the surface; starting clear
// of the margin avoids that local minimum.
std::vector<Vec3> initial_path(const DistanceQueryFn& field, int dim,
                               const Vec3& start, const Vec3& goal,
                               const PlanConfig& cfg) {
    const int M = cfg.num_waypoints;
    std::vector<Vec3> w(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k) {
        const double t = static_cast<double>(k) / (M - 1);
        w[static_cast<std::size_t>(k)] = start + t * (goal - start);
    }
    auto min_d = [&](const std::vector<Vec3>& path) {
        double m = std::numeric_limits<double>::infinity();
        for (const Vec3& p : path) m = std::min(m, field(p, nullptr, nullptr));
        return m;
    };
    if (min_d(w) >= cfg.safety_margin) return w;

    Vec3 seg = goal - start;
    const double len = seg.norm();
    Vec3 normal;
    if (dim == 2) {
        normal = Vec3{-seg[1], seg[0], 0.0} / len;
    } else {
        normal = seg.cross(Vec3::UnitZ());
        if (normal.norm() < 1e-9 * len) normal = seg.cross(Vec3::UnitX());
        normal.normalize();
    }
    std::vector<Vec3> best = w;
    double best_min = min_d(w);
    for (double amp = 0.25 * cfg.safety_margin; amp <= 2.0 * len;
         amp += 0.25 * cfg.safety_margin) {
        for (double sign : {1.0, -1.0}) {
            std::vector<Vec3> trial = w;
            for (int k = 1; k + 1 < M; ++k) {
                const double t = static_cast<double>(k) / (M - 1);
                trial[static_cast<std::size_t>(k)] +=
                    sign * amp * std::sin(M_PI * t) * normal;
            }
            const double m = min_d(trial);
            if (m > best_min) {
                best_min = m;
                best = trial;
            }
            if (m >= cfg.safety_margin) return best;
        }
    }
    return best;  // no clear bow found, descend from the best attempt
}

}  // namespace

PlanResult plan_path(const DistanceQueryFn& field, int dim, const Vec3& start,
                     const Vec3& goal, const PlanConfig& cfg) {
    cfg.validate();
    check_dim(dim);
    check_finite(start, dim);
    check_finite(goal, dim);
    if ((goal - start).norm() < 1e-12) throw UsageError("start == goal");
    if (field(start, nullptr, nullptr) < 0.5 * cfg.safety_margin ||
        field(goal, nullptr, nullptr) < 0.5 * cfg.safety_margin)
        throw UsageError("endpoint in collision margin");

    std::vector<Vec3> w = initial_path(field, dim, start, goal, cfg);
    const std::size_t M = w.size();

    PlanResult res;
    double c = total_cost(field, w, cfg);
    res.cost_history.push_back(c);
    double step = cfg.step;
    for (int it = 0; it < cfg.max_iters; ++it) {
        std::vector<Vec3> grad(M, Vec3::Zero());
        for (std::size_t k = 1; k + 1 < M; ++k) {
            // d/dw_k of the second-difference sum
            Vec3 g = Vec3::Zero();
            if (k >= 2) g += 2.0 * (w[k] - 2.0 * w[k - 1] + w[k - 2]);
            g += -4.0 * (w[k + 1] - 2.0 * w[k] + w[k - 1]);
            if (k + 2 < M) g += 2.0 * (w[k + 2] - 2.0 * w[k + 1] + w[k]);
            grad[k] = cfg.smoothness_weight * g;
        }
        for (std::size_t k = 1; k + 1 < M; ++k) {
            Vec3 fg;
            bool valid = false;
            const double d = field(w[k], &fg, &valid);
            if (d < cfg.safety_margin && valid)
                grad[k] += cfg.obstacle_weight * (-2.0 * (cfg.safety_margin - d)) * fg;
        }
        std::vector<Vec3> trial = w;
        for (std::size_t k = 1; k + 1 < M; ++k) trial[k] -= step * grad[k];
        const double ct = total_cost(field, trial, cfg);
        if (ct <= c) {
            const bool done = (c - ct) < cfg.cost_tol;
            w = std::move(trial);
            c = ct;
            res.cost_history.push_back(c);
            if (done) break;
        } else {
            step *= 0.5;  // line-search halving on increase
            if (step < 1e-12) break;
        }
    }
    res.trajectory.dim = dim;
    res.trajectory.fixed_endpoints = true;
    res.trajectory.waypoints = std::move(w);
    return res;
}

PlanResult plan_path(const Field& field, const Vec3& start, const Vec3& goal,
                     const PlanConfig& cfg) {
    return plan_path(query_fn(field), field.dim(), start, goal, cfg);
}

double path_clearance(const DistanceQueryFn& field, const Trajectory& traj) {
    if (traj.waypoints.size() < 2) throw UsageError("trajectory needs >= 2 waypoints");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.waypoints.size(); ++k) {
        m = std::min(m, field(traj.waypoints[k], nullptr, nullptr));
        if (k + 1 < traj.waypoints.size()) {
            const Vec3 mid = 0.5 * (traj.waypoints[k] + traj.waypoints[k + 1]);
            m = std::min(m, field(mid, nullptr, nullptr));
        }
    }
    return m;
}

double path_clearance(const Field& field, const Trajectory& traj) {
    return path_clearance(query_fn(field), traj);
}

}  // namespace gpdf

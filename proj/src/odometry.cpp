#include "gpdf/odometry.hpp"

#include <cmath>

namespace gpdf {

DistanceQueryFn query_fn(const Field& field) {
    return [&field](const Vec3& q, Vec3* grad, bool* valid) {
        return field.query_distance(q, grad, valid);
    };
}

DistanceQueryFn query_fn(SubmapGrid& grid) {
    return [&grid](const Vec3& q, Vec3* grad, bool* valid) {
        FieldSample s = grid.query_fused(q);
        if (grad) *grad = s.gradient;
        if (valid) *valid = s.valid_gradient;
        return s.distance;
    };
}

namespace {

double huber_weight(double r, double delta) {
    const double a = std::abs(r);
    return a <= delta ? 1.0 : delta / a;
}

struct CostEval {
    double robust_cost = 0.0;
    double rmse = 0.0;
    std::size_t usable = 0;
};

CostEval eval_cost(const DistanceQueryFn& field, const PointCloud& scan,
                   const Pose& T, double delta) {
    CostEval e;
    double sq = 0.0;
    for (const Vec3& p : scan.points) {
        Vec3 g;
        bool valid = false;
        const double d = field(T.apply(p), &g, &valid);
        if (!valid) continue;
        const double w = huber_weight(d, delta);
        e.robust_cost += w * d * d;
        sq += d * d;
        ++e.usable;
    }
    if (e.usable > 0) e.rmse = std::sqrt(sq / static_cast<double>(e.usable));
    return e;
}

}  // namespace

RegistrationReport register_scan(const DistanceQueryFn& field, int dim,
                                 const PointCloud& scan, const Pose& init,
                                 const RegisterOptions& opts) {
    check_dim(dim);
    if (scan.empty()) throw UsageError("register_scan: empty scan");
    const int dof = (dim == 2) ? 3 : 6;

    RegistrationReport rep;
    rep.pose = init;
    rep.pose.dim = dim;

    CostEval cur = eval_cost(field, scan, rep.pose, opts.huber_delta);
    if (cur.usable < 10) throw NumericError("insufficient overlap");
    rep.initial_rmse = cur.rmse;
    double damping = opts.init_damping;

    for (int it = 0; it < opts.max_iters; ++it) {
        rep.iterations = it + 1;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dof, dof);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(dof);
        std::size_t usable = 0;
        for (const Vec3& p : scan.points) {
            const Vec3 y = rep.pose.apply(p);
            Vec3 g;
            bool valid = false;
            const double d = field(y, &g, &valid);
            if (!valid) continue;
            ++usable;
            Eigen::VectorXd J(dof);
            if (dim == 2) {
                J << g[0], g[1], g[0] * (-y[1]) + g[1] * y[0];
            } else {
                const Vec3 c = y.cross(g);  // d r / d omega
                J << g[0], g[1], g[2], c[0], c[1], c[2];
            }
            const double w = huber_weight(d, opts.huber_delta);
            H.noalias() += w * J * J.transpose();
            b.noalias() += w * d * J;
        }
        rep.inlier_fraction =
            static_cast<double>(usable) / static_cast<double>(scan.size());
        if (usable < 10) throw NumericError("insufficient overlap");

        Eigen::MatrixXd Hd = H;
        Hd.diagonal().array() += damping;
        const Eigen::VectorXd xi = Hd.ldlt().solve(-b);
        const Pose trial = apply_left_increment(xi, rep.pose);
        const CostEval trial_eval = eval_cost(field, scan, trial, opts.huber_delta);
        if (trial_eval.usable >= 10 && trial_eval.robust_cost <= cur.robust_cost) {
            rep.pose = trial;
            cur = trial_eval;
            damping = std::max(damping / 10.0, 1e-12);
        } else {
            damping *= 10.0;
        }
        if (xi.norm() < opts.step_tol) {
            rep.converged = true;
            break;
        }
    }
    rep.final_rmse = cur.rmse;
    return rep;
}

RegistrationReport register_scan(const Field& field, const PointCloud& scan,
                                 const Pose& init, const RegisterOptions& opts) {
    return register_scan(query_fn(field), field.dim(), scan, init, opts);
}

RegistrationReport register_scan(SubmapGrid& grid, const PointCloud& scan,
                                 const Pose& init, const RegisterOptions& opts) {
    return register_scan(query_fn(grid), grid.dim(), scan, init, opts);
}

}  // namespace gpdf

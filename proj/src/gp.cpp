#include "gpdf/gp.hpp"

#include <cmath>

namespace gpdf {

namespace {

// Dedup within 1e-9 m, keep first occurrence. Quadratic; fit is O(N^3) anyway.
void dedup(std::vector<Vec3>& pts, Eigen::VectorXd& y, int dim) {
    std::vector<Vec3> out;
    std::vector<double> yout;
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dup = false;
        for (const Vec3& p : out) {
            double r2 = 0.0;
            for (int a = 0; a < dim; ++a) r2 += (p[a] - pts[i][a]) * (p[a] - pts[i][a]);
            if (r2 <= 1e-18) {
                dup = true;
                break;
            }
        }
        if (!dup) {
            out.push_back(pts[i]);
            yout.push_back(y[static_cast<Eigen::Index>(i)]);
        }
    }
    pts = std::move(out);
    y = Eigen::Map<Eigen::VectorXd>(yout.data(), static_cast<Eigen::Index>(yout.size()));
}

}  // namespace

GpModel GpModel::fit(const std::vector<Vec3>& points, const Eigen::VectorXd& targets,
                     const KernelSpec& kernel, double noise_variance, int dim) {
    check_dim(dim);
    kernel.validate();
    if (points.empty()) throw UsageError("fit: empty point set");
    if (static_cast<Eigen::Index>(points.size()) != targets.size())
        throw UsageError("fit: |points| != |targets|");
    if (noise_variance < 0.0 || !std::isfinite(noise_variance))
        throw UsageError("fit: noise_variance must be >= 0");
    std::vector<Vec3> pts = points;
    for (const Vec3& p : pts) check_finite(p, dim);
    if (!targets.allFinite()) throw UsageError("fit: non-finite target");
    Eigen::VectorXd y = targets;
    dedup(pts, y, dim);

    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = kernel.signal_variance;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double k = kernel_eval(kernel, pts[static_cast<std::size_t>(i)],
                                   pts[static_cast<std::size_t>(j)], dim);
            K(i, j) = k;
            K(j, i) = k;
        }
    }

    GpModel m;
    m.train_ = TrainingSet::from_points(pts, dim);
    m.kernel_ = kernel;
    m.noise_variance_ = noise_variance;

    const double jitters[3] = {1e-8, 1e-6, 1e-4};
    Eigen::LLT<Eigen::MatrixXd> llt;
    bool ok = false;
    for (double j : jitters) {
        const double jit = j * kernel.signal_variance;
        Eigen::MatrixXd A = K;
        A.diagonal().array() += noise_variance + jit;
        llt.compute(A);
        if (llt.info() == Eigen::Success) {
            m.jitter_ = jit;
            ok = true;
            break;
        }
    }
    if (!ok) throw NumericError("gram matrix not positive definite");

    m.chol_ = llt.matrixL();
    // alpha targets (K + noise I) alpha = y; the jittered factor is the
    // solver, iterative refinement removes the jitter bias.
    Eigen::MatrixXd B = K;
    B.diagonal().array() += noise_variance;
    Eigen::VectorXd alpha = llt.solve(y);
    for (int it = 0; it < 2; ++it) {
        Eigen::VectorXd r = y - B * alpha;
        alpha += llt.solve(r);
    }
    m.alpha_ = std::move(alpha);
    return m;
}

double GpModel::predict_mean(const Vec3& q) const {
    check_finite(q, train_.dim);
    Vec3 g;
    return active_backend().weighted_sum_and_grad(kernel_, train_, alpha_.data(), q, g);
}

double GpModel::predict_mean_and_grad(const Vec3& q, Vec3& grad) const {
    check_finite(q, train_.dim);
    double m = active_backend().weighted_sum_and_grad(kernel_, train_, alpha_.data(), q, grad);
    if (train_.dim == 2) grad[2] = 0.0;
    return m;
}

double GpModel::predict_variance(const Vec3& q) const {
    check_finite(q, train_.dim);
    const Eigen::Index n = static_cast<Eigen::Index>(train_.n);
    Eigen::VectorXd k(n);
    active_backend().row(kernel_, train_, q, k.data());
    chol_.triangularView<Eigen::Lower>().solveInPlace(k);
    double var = kernel_.signal_variance - k.squaredNorm();
    if (var < -1e-9) var = 0.0;  // larger negatives would mean a broken factor
    return var < 0.0 ? 0.0 : var;
}

void GpModel::predict_mean_grad_var(const Vec3& q, double& mean, Vec3& grad,
                                    double& var) const {
    check_finite(q, train_.dim);
    const Eigen::Index n = static_cast<Eigen::Index>(train_.n);
    Eigen::VectorXd k(n);
    active_backend().row(kernel_, train_, q, k.data());
    mean = active_backend().weighted_sum_and_grad(kernel_, train_, alpha_.data(), q, grad);
    if (train_.dim == 2) grad[2] = 0.0;
    chol_.triangularView<Eigen::Lower>().solveInPlace(k);
    double v = kernel_.signal_variance - k.squaredNorm();
    var = v < 0.0 ? 0.0 : v;
}

}  // namespace gpdf

#pragma once

#include "gpdf/kernel_rows.hpp"

#include <Eigen/Dense>

namespace gpdf {

// Exact GP regression model, immutable after fit().
class GpModel {
  public:
    // points are deduplicated (within 1e-9 m, keeping first). Throws on
    // empty input or a Gram matrix that stays indefinite after jitter
    // escalation.
    static GpModel fit(const std::vector<Vec3>& points,
                       const Eigen::VectorXd& targets, const KernelSpec& kernel,
                       double noise_variance, int dim);

    double predict_mean(const Vec3& q) const;
    double predict_mean_and_grad(const Vec3& q, Vec3& grad) const;
    double predict_variance(const Vec3& q) const;  // clamped to [0, sigma^2]

    // Posterior mean and variance in one pass (shares the kernel row).
    void predict_mean_grad_var(const Vec3& q, double& mean, Vec3& grad,
                               double& var) const;

    int dim() const { return train_.dim; }
    std::size_t size() const { return train_.n; }
    const TrainingSet& training_set() const { return train_; }
    const KernelSpec& kernel() const { return kernel_; }
    double noise_variance() const { return noise_variance_; }
    double jitter() const { return jitter_; }
    const Eigen::MatrixXd& chol_L() const { return chol_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }

  private:
    GpModel() = default;

    TrainingSet train_;
    KernelSpec kernel_;
    double noise_variance_ = 0.0;
    double jitter_ = 0.0;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd alpha_;
};

}  // namespace gpdf

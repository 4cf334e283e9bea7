#pragma once

#include "gpdf/gp.hpp"

namespace gpdf {

enum class FieldVariant { LogGpis, Reverting };

struct FieldConfig {
    FieldVariant variant = FieldVariant::Reverting;
    KernelSpec kernel;
    double noise_variance = 1e-4;
    double uncertainty_beta = 1.0;

    void validate() const;
};

// Per-query bundle of field outputs.
struct FieldSample {
    double distance = 0.0;        // meters, >= 0
    Vec3 gradient = Vec3::Zero(); // direction of increasing distance
    Vec3 normal = Vec3::Zero();   // -gradient normalized (toward the surface)
    double occupancy = 0.0;       // clamped posterior mean
    double uncertainty = 0.0;     // meters, >= 0
    bool valid_gradient = false;
};

// Median nearest-neighbor spacing of a cloud, the basis of the default
// length-scale heuristic (l = 4 * spacing).
double median_nn_spacing(const PointCloud& cloud);

// Default hyperparameters for a variant, adapted to the cloud density.
FieldConfig default_config(FieldVariant variant, const PointCloud& cloud);

// Continuous distance field over a fitted GP; immutable after build.
class Field {
  public:
    static Field build(const PointCloud& cloud, const FieldConfig& config);

    FieldSample query(const Vec3& q) const;
    std::vector<FieldSample> query_batch(const std::vector<Vec3>& qs) const;

    // Distance/gradient only; skips the O(N^2) variance solve. grad and
    // valid may be null when only the distance is needed.
    double query_distance(const Vec3& q, Vec3* grad = nullptr,
                          bool* valid = nullptr) const;

    int dim() const { return model_.dim(); }
    const FieldConfig& config() const { return cfg_; }
    const GpModel& model() const { return model_; }

  private:
    Field(GpModel m, FieldConfig c) : model_(std::move(m)), cfg_(std::move(c)) {}

    GpModel model_;
    FieldConfig cfg_;
};

// Shared occupancy -> distance map for a variant; also used by the
// submap fusion path. Returns distance and d(distance)/d(occupancy).
RevertResult occupancy_to_distance(const FieldConfig& cfg, double occupancy);

// Assemble a FieldSample from posterior mean/gradient/variance.
FieldSample make_sample(const FieldConfig& cfg, double mean, const Vec3& mean_grad,
                        double var, bool on_matern12_point);

}  // namespace gpdf

#include "gpdf/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpdf {

void FieldConfig::validate() const {
    kernel.validate();
    if (noise_variance < 0.0) throw UsageError("noise_variance must be >= 0");
    if (uncertainty_beta < 0.0) throw UsageError("uncertainty_beta must be >= 0");
    if (variant == FieldVariant::LogGpis) {
        if (kernel.family == KernelFamily::SquaredExponential)
            throw UsageError("LogGpis requires a Matern12 or Matern32 kernel");
        const double want = (kernel.family == KernelFamily::Matern12)
                                ? 1.0 / kernel.loggpis_rate
                                : std::sqrt(3.0) / kernel.loggpis_rate;
        if (std::abs(kernel.length_scale - want) > 1e-9 * want)
            throw UsageError("LogGpis length_scale must be tied to 1/lambda");
    }
}

double median_nn_spacing(const PointCloud& cloud) {
    const std::size_t n = cloud.size();
    if (n < 2) return 1.0;
    std::vector<double> nn(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double r2 = 0.0;
            for (int a = 0; a < cloud.dim; ++a) {
                double d = cloud.points[i][a] - cloud.points[j][a];
                r2 += d * d;
            }
            nn[i] = std::min(nn[i], r2);
            nn[j] = std::min(nn[j], r2);
        }
    }
    std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(n / 2), nn.end());
    return std::sqrt(nn[n / 2]);
}

FieldConfig default_config(FieldVariant variant, const PointCloud& cloud) {
    FieldConfig cfg;
    cfg.variant = variant;
    // The occupancy a query sees scales with the number of samples inside a
    // length-scale ball, ~(l/spacing)^(dim-1) for a surface cloud. Keep that
    // count comparable across dimensions or closed 3D surfaces saturate
    // their interior.
    const double mult = cloud.dim == 3 ? 1.5 : 4.0;
    const double l = mult * median_nn_spacing(cloud);
    cfg.kernel.signal_variance = 1.0;
    cfg.noise_variance = 1e-4;
    if (variant == FieldVariant::Reverting) {
        cfg.kernel.family = KernelFamily::SquaredExponential;
        cfg.kernel.length_scale = l;
        cfg.kernel.loggpis_rate = 1.0 / l;
    } else {
        cfg.kernel.family = KernelFamily::Matern12;
        cfg.kernel.loggpis_rate = 1.0 / l;
        cfg.kernel.length_scale = l;
    }
    return cfg;
}

RevertResult occupancy_to_distance(const FieldConfig& cfg, double o) {
    const KernelSpec& k = cfg.kernel;
    if (cfg.variant == FieldVariant::Reverting) return reverting_distance(k, o);
    // LogGpis: d = -ln(o / sigma^2) / lambda
    if (o >= k.signal_variance) return {0.0, 0.0};
    const double floor = occupancy_floor(k);
    if (o < floor) o = floor;
    const double lam = k.loggpis_rate;
    return {-std::log(o / k.signal_variance) / lam, -1.0 / (lam * o)};
}

FieldSample make_sample(const FieldConfig& cfg, double mean, const Vec3& mean_grad,
                        double var, bool on_matern12_point) {
    const KernelSpec& kern = cfg.kernel;
    FieldSample s;
    s.occupancy = std::clamp(mean, occupancy_floor(kern), kern.signal_variance);
    RevertResult rr = occupancy_to_distance(cfg, s.occupancy);
    s.distance = rr.distance;
    s.gradient = rr.derivative * mean_grad;

    const double gn = s.gradient.norm();
    s.valid_gradient = mean_grad.norm() >= 1e-12 && !on_matern12_point &&
                       gn > 0.0 && gn < 10.0 && s.gradient.allFinite();
    if (s.valid_gradient)
        s.normal = -s.gradient / gn;
    else
        s.normal = Vec3::Zero();

    // Interval image of +-beta posterior std through the distance map.
    const double sd = cfg.uncertainty_beta * std::sqrt(std::max(var, 0.0));
    const double olo = std::clamp(s.occupancy - sd, occupancy_floor(kern), kern.signal_variance);
    const double ohi = std::clamp(s.occupancy + sd, occupancy_floor(kern), kern.signal_variance);
    s.uncertainty = 0.5 * std::abs(occupancy_to_distance(cfg, olo).distance -
                                   occupancy_to_distance(cfg, ohi).distance);
    return s;
}

Field Field::build(const PointCloud& cloud, const FieldConfig& config) {
    config.validate();
    if (cloud.empty()) throw UsageError("build_field: empty cloud");
    check_dim(cloud.dim);
    Eigen::VectorXd targets =
        Eigen::VectorXd::Ones(static_cast<Eigen::Index>(cloud.size()));
    GpModel m = GpModel::fit(cloud.points, targets, config.kernel,
                             config.noise_variance, cloud.dim);
    return Field(std::move(m), config);
}

namespace {

bool on_training_point(const GpModel& m, const Vec3& q) {
    const TrainingSet& ts = m.training_set();
    for (std::size_t i = 0; i < ts.n; ++i) {
        const double dx = q[0] - ts.xs[i];
        const double dy = q[1] - ts.ys[i];
        const double dz = (ts.dim == 3) ? q[2] - ts.zs[i] : 0.0;
        if (dx * dx + dy * dy + dz * dz <= 1e-18) return true;
    }
    return false;
}

}  // namespace

FieldSample Field::query(const Vec3& q) const {
    double mean, var;
    Vec3 grad;
    model_.predict_mean_grad_var(q, mean, grad, var);
    const bool on_pt = cfg_.kernel.family == KernelFamily::Matern12 &&
                       on_training_point(model_, q);
    return make_sample(cfg_, mean, grad, var, on_pt);
}

double Field::query_distance(const Vec3& q, Vec3* grad, bool* valid) const {
    Vec3 mg;
    double mean = model_.predict_mean_and_grad(q, mg);
    const KernelSpec& kern = cfg_.kernel;
    const double o = std::clamp(mean, occupancy_floor(kern), kern.signal_variance);
    RevertResult rr = occupancy_to_distance(cfg_, o);
    if (grad || valid) {
        Vec3 g = rr.derivative * mg;
        const double gn = g.norm();
        bool ok = mg.norm() >= 1e-12 && gn > 0.0 && gn < 10.0 && g.allFinite();
        if (ok && kern.family == KernelFamily::Matern12 && on_training_point(model_, q))
            ok = false;
        if (grad) *grad = ok ? g : Vec3::Zero();
        if (valid) *valid = ok;
    }
    return rr.distance;
}

std::vector<FieldSample> Field::query_batch(const std::vector<Vec3>& qs) const {
    for (std::size_t i = 0; i < qs.size(); ++i) {
        for (int a = 0; a < dim(); ++a)
            if (!std::isfinite(qs[i][a]))
                throw UsageError("query_batch: non-finite point at index " +
                                 std::to_string(i));
    }
    std::vector<FieldSample> out;
    out.reserve(qs.size());
    for (const Vec3& q : qs) out.push_back(query(q));
    return out;
}

}  // namespace gpdf

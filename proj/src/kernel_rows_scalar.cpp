#include "gpdf/kernel_rows.hpp"

#include <cmath>

namespace gpdf {

TrainingSet TrainingSet::from_points(const std::vector<Vec3>& pts, int dim) {
    TrainingSet ts;
    ts.dim = dim;
    ts.n = pts.size();
    ts.xs.resize(ts.n);
    ts.ys.resize(ts.n);
    ts.zs.assign(ts.n, 0.0);
    for (std::size_t i = 0; i < ts.n; ++i) {
        ts.xs[i] = pts[i][0];
        ts.ys[i] = pts[i][1];
        if (dim == 3) ts.zs[i] = pts[i][2];
    }
    return ts;
}

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

void row_scalar(const KernelSpec& spec, const TrainingSet& ts, const Vec3& q,
                double* out) {
    const double l = spec.length_scale, sv = spec.signal_variance;
    const double inv2l2 = 1.0 / (2.0 * l * l);
    for (std::size_t i = 0; i < ts.n; ++i) {
        const double dx = q[0] - ts.xs[i];
        const double dy = q[1] - ts.ys[i];
        const double dz = (ts.dim == 3) ? q[2] - ts.zs[i] : 0.0;
        const double r2 = dx * dx + dy * dy + dz * dz;
        switch (spec.family) {
            case KernelFamily::Matern12:
                out[i] = sv * std::exp(-std::sqrt(r2) / l);
                break;
            case KernelFamily::Matern32: {
                const double t = kSqrt3 * std::sqrt(r2) / l;
                out[i] = sv * (1.0 + t) * std::exp(-t);
                break;
            }
            case KernelFamily::SquaredExponential:
                out[i] = sv * std::exp(-r2 * inv2l2);
                break;
        }
    }
}

double wsg_scalar(const KernelSpec& spec, const TrainingSet& ts, const double* w,
                  const Vec3& q, Vec3& grad) {
    const double l = spec.length_scale, sv = spec.signal_variance;
    const double inv2l2 = 1.0 / (2.0 * l * l);
    const double invl2 = 1.0 / (l * l);
    double acc = 0.0, gx = 0.0, gy = 0.0, gz = 0.0;
    for (std::size_t i = 0; i < ts.n; ++i) {
        const double dx = q[0] - ts.xs[i];
        const double dy = q[1] - ts.ys[i];
        const double dz = (ts.dim == 3) ? q[2] - ts.zs[i] : 0.0;
        const double r2 = dx * dx + dy * dy + dz * dz;
        double k = 0.0, f = 0.0;  // f: grad = f * (q - x_i)
        switch (spec.family) {
            case KernelFamily::Matern12: {
                const double r = std::sqrt(r2);
                k = sv * std::exp(-r / l);
                f = (r > 1e-300) ? -k / (l * r) : 0.0;
                break;
            }
            case KernelFamily::Matern32: {
                const double e = std::exp(-kSqrt3 * std::sqrt(r2) / l);
                k = sv * (1.0 + kSqrt3 * std::sqrt(r2) / l) * e;
                f = -3.0 * sv * invl2 * e;
                break;
            }
            case KernelFamily::SquaredExponential:
                k = sv * std::exp(-r2 * inv2l2);
                f = -k * invl2;
                break;
        }
        const double wi = w[i];
        acc += wi * k;
        const double wf = wi * f;
        gx += wf * dx;
        gy += wf * dy;
        gz += wf * dz;
    }
    grad = {gx, gy, gz};
    return acc;
}

}  // namespace

const KernelRowBackend& scalar_backend() {
    static const KernelRowBackend b{"scalar", row_scalar, wsg_scalar};
    return b;
}

}  // namespace gpdf

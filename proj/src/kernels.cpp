#include "gpdf/kernels.hpp"

#include <cmath>

namespace gpdf {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
}

void KernelSpec::validate() const {
    if (!(length_scale > 0.0) || !std::isfinite(length_scale))
        throw UsageError("kernel length_scale must be > 0");
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
        throw UsageError("kernel signal_variance must be > 0");
    if (!(loggpis_rate > 0.0) || !std::isfinite(loggpis_rate))
        throw UsageError("kernel loggpis_rate must be > 0");
}

double kernel_of_distance(const KernelSpec& spec, double r) {
    const double l = spec.length_scale;
    const double sv = spec.signal_variance;
    switch (spec.family) {
        case KernelFamily::Matern12:
            return sv * std::exp(-r / l);
        case KernelFamily::Matern32: {
            const double t = kSqrt3 * r / l;
            return sv * (1.0 + t) * std::exp(-t);
        }
        case KernelFamily::SquaredExponential:
            return sv * std::exp(-r * r / (2.0 * l * l));
    }
    throw UsageError("unknown kernel family");
}

double kernel_eval(const KernelSpec& spec, const Vec3& a, const Vec3& b, int dim) {
    check_dim(dim);
    check_finite(a, dim);
    check_finite(b, dim);
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += (a[i] - b[i]) * (a[i] - b[i]);
    return kernel_of_distance(spec, std::sqrt(r2));
}

Vec3 kernel_grad_x(const KernelSpec& spec, const Vec3& a, const Vec3& b, int dim) {
    check_dim(dim);
    check_finite(a, dim);
    check_finite(b, dim);
    const double l = spec.length_scale;
    const double sv = spec.signal_variance;
    Vec3 d = Vec3::Zero();
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) {
        d[i] = a[i] - b[i];
        r2 += d[i] * d[i];
    }
    const double r = std::sqrt(r2);
    // dk/dr * (a-b)/r, written per family so the r==0 limits fall out.
    switch (spec.family) {
        case KernelFamily::Matern12: {
            if (r < 1e-300) return Vec3::Zero();  // undefined at r=0, zero by convention
            const double f = -(sv / l) * std::exp(-r / l) / r;
            return f * d;
        }
        case KernelFamily::Matern32: {
            const double f = -(3.0 * sv / (l * l)) * std::exp(-kSqrt3 * r / l);
            return f * d;
        }
        case KernelFamily::SquaredExponential: {
            const double f = -(sv / (l * l)) * std::exp(-r2 / (2.0 * l * l));
            return f * d;
        }
    }
    throw UsageError("unknown kernel family");
}

RevertResult reverting_distance(const KernelSpec& spec, double occupancy) {
    if (!std::isfinite(occupancy)) throw UsageError("occupancy must be finite");
    const double sv = spec.signal_variance;
    const double l = spec.length_scale;
    if (occupancy >= sv) return {0.0, 0.0};
    double o = occupancy;
    const double floor = occupancy_floor(spec);
    if (o < floor) o = floor;
    const double u = o / sv;
    switch (spec.family) {
        case KernelFamily::Matern12: {
            const double d = -l * std::log(u);
            return {d, -l / o};
        }
        case KernelFamily::SquaredExponential: {
            const double d = l * std::sqrt(-2.0 * std::log(u));
            // o = sv*exp(-d^2/(2 l^2))  =>  dd/do = -l^2/(d*o)
            return {d, -l * l / (d * o)};
        }
        case KernelFamily::Matern32: {
            // Solve (1+t) e^{-t} = u by safeguarded Newton, d = l*t/sqrt(3).
            double lo = 0.0, hi = 50.0;
            double t = std::sqrt(-2.0 * std::log(u));
            if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
            for (int it = 0; it < 50; ++it) {
                const double e = std::exp(-t);
                const double g = (1.0 + t) * e - u;
                if (g > 0.0)
                    lo = t;
                else
                    hi = t;
                const double dg = -t * e;
                double step = (std::abs(dg) > 1e-300) ? g / dg : 0.0;
                double tn = t - step;
                if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);  // bisection fallback
                if (std::abs(tn - t) < 1e-12) {
                    t = tn;
                    break;
                }
                t = tn;
            }
            const double d = l * t / kSqrt3;
            // du/dt = -t e^{-t};  dd/do = (l/sqrt3) / (sv * du/dt)
            const double dudt = -t * std::exp(-t);
            const double deriv = (std::abs(dudt) > 1e-300)
                                     ? (l / kSqrt3) / (sv * dudt)
                                     : 0.0;
            return {d, deriv};
        }
    }
    throw UsageError("unknown kernel family");
}

}  // namespace gpdf

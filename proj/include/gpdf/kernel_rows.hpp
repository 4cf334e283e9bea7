#pragma once

#include "gpdf/kernels.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace gpdf {

// Structure-of-arrays copy of the training inputs, the layout the
// kernel-row inner loops run over.
struct TrainingSet {
    int dim = 0;
    std::size_t n = 0;
    std::vector<double> xs, ys, zs;

    static TrainingSet from_points(const std::vector<Vec3>& pts, int dim);
    Vec3 point(std::size_t i) const {
        return {xs[i], ys[i], dim == 3 ? zs[i] : 0.0};
    }
};

// One backend = one implementation of the two hot loops. The scalar
// backend is the reference; vector backends must agree with it to
// tight relative tolerance (see the equivalence tests).
struct KernelRowBackend {
    const char* name;

    // out[i] = k(q, x_i), i = 0..n-1
    void (*row)(const KernelSpec&, const TrainingSet&, const Vec3& q, double* out);

    // Returns sum_i w[i] * k(q, x_i); accumulates sum_i w[i] * grad_q k(q, x_i)
    // into grad (overwritten).
    double (*weighted_sum_and_grad)(const KernelSpec&, const TrainingSet&,
                                    const double* w, const Vec3& q, Vec3& grad);
};

const KernelRowBackend& scalar_backend();
bool avx2_available();
const KernelRowBackend& avx2_backend();  // only call if avx2_available()

// Best backend for this machine; GPDF_FORCE_SCALAR=1 in the environment
// pins the scalar reference.
const KernelRowBackend& active_backend();

}  // namespace gpdf

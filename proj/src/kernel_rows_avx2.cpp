// AVX2 variants of the kernel-row loops. Compiled with -mavx2 -mfma on
// x86_64 only; dispatch happens in kernel_rows_dispatch.cpp.

#include "gpdf/kernel_rows.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace gpdf {
namespace {

constexpr double kSqrt3 = 1.7320508075688772;

// Cephes-style exp for 4 doubles: range reduction by log2(e), rational
// approximation on the reduced argument, exponent reassembly.
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);    // ln2 hi
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);  // ln2 lo
    const __m256d one = _mm256_set1_pd(1.0);

    x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
    x = _mm256_min_pd(x, _mm256_set1_pd(708.0));

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    x = _mm256_fnmadd_pd(n, c1, x);
    x = _mm256_fnmadd_pd(n, c2, x);

    const __m256d x2 = _mm256_mul_pd(x, x);
    __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
    p = _mm256_fmadd_pd(p, x2, _mm256_set1_pd(3.02994407707441961300e-2));
    p = _mm256_fmadd_pd(p, x2, _mm256_set1_pd(9.99999999999999999910e-1));
    p = _mm256_mul_pd(p, x);
    __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
    q = _mm256_fmadd_pd(q, x2, _mm256_set1_pd(2.52448340349684104192e-3));
    q = _mm256_fmadd_pd(q, x2, _mm256_set1_pd(2.27265548208155028766e-1));
    q = _mm256_fmadd_pd(q, x2, _mm256_set1_pd(2.0));
    __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    e = _mm256_add_pd(one, _mm256_add_pd(e, e));

    // e *= 2^n
    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    __m256i pow2 = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(e, _mm256_castsi256_pd(pow2));
}

struct Dists {
    __m256d dx, dy, dz, r2;
};

inline Dists load_dists(const TrainingSet& ts, const Vec3& q, std::size_t i) {
    Dists d;
    d.dx = _mm256_sub_pd(_mm256_set1_pd(q[0]), _mm256_loadu_pd(&ts.xs[i]));
    d.dy = _mm256_sub_pd(_mm256_set1_pd(q[1]), _mm256_loadu_pd(&ts.ys[i]));
    d.r2 = _mm256_fmadd_pd(d.dy, d.dy, _mm256_mul_pd(d.dx, d.dx));
    if (ts.dim == 3) {
        d.dz = _mm256_sub_pd(_mm256_set1_pd(q[2]), _mm256_loadu_pd(&ts.zs[i]));
        d.r2 = _mm256_fmadd_pd(d.dz, d.dz, d.r2);
    } else {
        d.dz = _mm256_setzero_pd();
    }
    return d;
}

void row_avx2(const KernelSpec& spec, const TrainingSet& ts, const Vec3& q,
              double* out) {
    const double l = spec.length_scale, sv = spec.signal_variance;
    const std::size_t n4 = ts.n & ~std::size_t(3);
    std::size_t i = 0;
    switch (spec.family) {
        case KernelFamily::SquaredExponential: {
            const __m256d m = _mm256_set1_pd(-1.0 / (2.0 * l * l));
            const __m256d vsv = _mm256_set1_pd(sv);
            for (; i < n4; i += 4) {
                Dists d = load_dists(ts, q, i);
                __m256d k = _mm256_mul_pd(vsv, exp_pd(_mm256_mul_pd(d.r2, m)));
                _mm256_storeu_pd(out + i, k);
            }
            break;
        }
        case KernelFamily::Matern12: {
            const __m256d minvl = _mm256_set1_pd(-1.0 / l);
            const __m256d vsv = _mm256_set1_pd(sv);
            for (; i < n4; i += 4) {
                Dists d = load_dists(ts, q, i);
                __m256d r = _mm256_sqrt_pd(d.r2);
                __m256d k = _mm256_mul_pd(vsv, exp_pd(_mm256_mul_pd(r, minvl)));
                _mm256_storeu_pd(out + i, k);
            }
            break;
        }
        case KernelFamily::Matern32: {
            const __m256d s3l = _mm256_set1_pd(kSqrt3 / l);
            const __m256d vsv = _mm256_set1_pd(sv);
            const __m256d one = _mm256_set1_pd(1.0);
            for (; i < n4; i += 4) {
                Dists d = load_dists(ts, q, i);
                __m256d t = _mm256_mul_pd(_mm256_sqrt_pd(d.r2), s3l);
                __m256d k = _mm256_mul_pd(
                    vsv, _mm256_mul_pd(_mm256_add_pd(one, t),
                                       exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), t))));
                _mm256_storeu_pd(out + i, k);
            }
            break;
        }
    }
    // scalar tail
    for (; i < ts.n; ++i) {
        const double dx = q[0] - ts.xs[i];
        const double dy = q[1] - ts.ys[i];
        const double dz = (ts.dim == 3) ? q[2] - ts.zs[i] : 0.0;
        out[i] = kernel_of_distance(spec, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double wsg_avx2(const KernelSpec& spec, const TrainingSet& ts, const double* w,
                const Vec3& q, Vec3& grad) {
    const double l = spec.length_scale, sv = spec.signal_variance;
    const std::size_t n4 = ts.n & ~std::size_t(3);
    __m256d acc = _mm256_setzero_pd();
    __m256d agx = _mm256_setzero_pd();
    __m256d agy = _mm256_setzero_pd();
    __m256d agz = _mm256_setzero_pd();
    std::size_t i = 0;
    switch (spec.family) {
        case KernelFamily::SquaredExponential: {
            const __m256d m = _mm256_set1_pd(-1.0 / (2.0 * l * l));
            const __m256d minvl2 = _mm256_set1_pd(-1.0 / (l * l));
            const __m256d vsv = _mm256_set1_pd(sv);
            for (; i < n4; i += 4) {
                Dists d = load_dists(ts, q, i);
                __m256d k = _mm256_mul_pd(vsv, exp_pd(_mm256_mul_pd(d.r2, m)));
                __m256d wi = _mm256_loadu_pd(w + i);
                acc = _mm256_fmadd_pd(wi, k, acc);
                __m256d wf = _mm256_mul_pd(wi, _mm256_mul_pd(k, minvl2));
                agx = _mm256_fmadd_pd(wf, d.dx, agx);
                agy = _mm256_fmadd_pd(wf, d.dy, agy);
                agz = _mm256_fmadd_pd(wf, d.dz, agz);
            }
            break;
        }
        case KernelFamily::Matern12: {
            const __m256d minvl = _mm256_set1_pd(-1.0 / l);
            const __m256d vsv = _mm256_set1_pd(sv);
            const __m256d tiny = _mm256_set1_pd(1e-300);
            for (; i < n4; i += 4) {
                Dists d = load_dists(ts, q, i);
                __m256d r = _mm256_sqrt_pd(d.r2);
                __m256d k = _mm256_mul_pd(vsv, exp_pd(_mm256_mul_pd(r, minvl)));
                __m256d lr = _mm256_mul_pd(_mm256_set1_pd(l), r);
                __m256d f = _mm256_div_pd(_mm256_sub_pd(_mm256_setzero_pd(), k), lr);
                f = _mm256_and_pd(f, _mm256_cmp_pd(r, tiny, _CMP_GT_OQ));
                __m256d wi = _mm256_loadu_pd(w + i);
                acc = _mm256_fmadd_pd(wi, k, acc);
                __m256d wf = _mm256_mul_pd(wi, f);
                agx = _mm256_fmadd_pd(wf, d.dx, agx);
                agy = _mm256_fmadd_pd(wf, d.dy, agy);
                agz = _mm256_fmadd_pd(wf, d.dz, agz);
            }
            break;
        }
        case KernelFamily::Matern32: {
            const __m256d s3l = _mm256_set1_pd(kSqrt3 / l);
            const __m256d vsv = _mm256_set1_pd(sv);
            const __m256d one = _mm256_set1_pd(1.0);
            const __m256d m3l2 = _mm256_set1_pd(-3.0 * sv / (l * l));
            for (; i < n4; i += 4) {
                Dists d = load_dists(ts, q, i);
                __m256d t = _mm256_mul_pd(_mm256_sqrt_pd(d.r2), s3l);
                __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), t));
                __m256d k = _mm256_mul_pd(vsv, _mm256_mul_pd(_mm256_add_pd(one, t), e));
                __m256d f = _mm256_mul_pd(m3l2, e);
                __m256d wi = _mm256_loadu_pd(w + i);
                acc = _mm256_fmadd_pd(wi, k, acc);
                __m256d wf = _mm256_mul_pd(wi, f);
                agx = _mm256_fmadd_pd(wf, d.dx, agx);
                agy = _mm256_fmadd_pd(wf, d.dy, agy);
                agz = _mm256_fmadd_pd(wf, d.dz, agz);
            }
            break;
        }
    }
    double sum = hsum(acc);
    double gx = hsum(agx), gy = hsum(agy), gz = hsum(agz);
    const double invl2 = 1.0 / (l * l);
    for (; i < ts.n; ++i) {
        const double dx = q[0] - ts.xs[i];
        const double dy = q[1] - ts.ys[i];
        const double dz = (ts.dim == 3) ? q[2] - ts.zs[i] : 0.0;
        const double r2 = dx * dx + dy * dy + dz * dz;
        double k = 0.0, f = 0.0;
        switch (spec.family) {
            case KernelFamily::Matern12: {
                const double r = std::sqrt(r2);
                k = sv * std::exp(-r / l);
                f = (r > 1e-300) ? -k / (l * r) : 0.0;
                break;
            }
            case KernelFamily::Matern32: {
                const double t = kSqrt3 * std::sqrt(r2) / l;
                const double e = std::exp(-t);
                k = sv * (1.0 + t) * e;
                f = -3.0 * sv * invl2 * e;
                break;
            }
            case KernelFamily::SquaredExponential:
                k = sv * std::exp(-r2 / (2.0 * l * l));
                f = -k * invl2;
                break;
        }
        sum += w[i] * k;
        const double wf = w[i] * f;
        gx += wf * dx;
        gy += wf * dy;
        gz += wf * dz;
    }
    grad = {gx, gy, gz};
    return sum;
}

}  // namespace

const KernelRowBackend& avx2_backend() {
    static const KernelRowBackend b{"avx2", row_avx2, wsg_avx2};
    return b;
}

}  // namespace gpdf

#endif  // x86_64

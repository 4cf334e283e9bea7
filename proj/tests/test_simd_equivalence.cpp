#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpdf/kernel_rows.hpp"

#include <cmath>
#include <random>
#include <string>

using namespace gpdf;

namespace {

TrainingSet random_set(std::size_t n, int dim, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < n; ++i)
        pts.emplace_back(u(rng), u(rng), dim == 3 ? u(rng) : 0.0);
    return TrainingSet::from_points(pts, dim);
}

}  // namespace

TEST_CASE("active backend is one of the registered backends") {
    const std::string name = active_backend().name;
    CHECK((name == std::string(scalar_backend().name) ||
           (avx2_available() && name == std::string(avx2_backend().name))));
}

TEST_CASE("avx2 row and weighted-sum agree with the scalar reference") {
    if (!avx2_available()) {
        MESSAGE("AVX2 not available on this machine; skipping");
        return;
    }
    const auto& ref = scalar_backend();
    const auto& vec = avx2_backend();
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> u(-2.0, 2.0), uw(-1.0, 1.0);

    for (auto family : {KernelFamily::Matern12, KernelFamily::Matern32,
                        KernelFamily::SquaredExponential}) {
        KernelSpec spec;
        spec.family = family;
        spec.length_scale = 0.63;
        spec.signal_variance = 1.7;
        for (int dim : {2, 3}) {
            // sizes straddling the vector width, including ragged tails
            for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 13u, 31u, 64u, 257u}) {
                const TrainingSet ts = random_set(n, dim, rng);
                const Vec3 q{u(rng), u(rng), dim == 3 ? u(rng) : 0.0};

                std::vector<double> r1(n), r2(n);
                ref.row(spec, ts, q, r1.data());
                vec.row(spec, ts, q, r2.data());
                for (std::size_t i = 0; i < n; ++i) {
                    const double tol = 1e-13 * std::max(1.0, std::abs(r1[i]));
                    CHECK(std::abs(r1[i] - r2[i]) <= tol);
                }

                std::vector<double> w(n);
                for (auto& x : w) x = uw(rng);
                Vec3 g1 = Vec3::Zero(), g2 = Vec3::Zero();
                const double s1 = ref.weighted_sum_and_grad(spec, ts, w.data(), q, g1);
                const double s2 = vec.weighted_sum_and_grad(spec, ts, w.data(), q, g2);
                CHECK(std::abs(s1 - s2) <= 1e-12 * std::max(1.0, std::abs(s1)));
                CHECK((g1 - g2).norm() <= 1e-12 * std::max(1.0, g1.norm()));
            }
        }
    }
}

TEST_CASE("avx2 handles a query coincident with a training point") {
    if (!avx2_available()) return;
    std::mt19937 rng(5);
    const TrainingSet ts = random_set(21, 2, rng);
    KernelSpec spec;
    spec.family = KernelFamily::Matern12;
    spec.length_scale = 0.5;
    const Vec3 q = ts.point(10);
    std::vector<double> w(ts.n, 0.3), r1(ts.n), r2(ts.n);
    scalar_backend().row(spec, ts, q, r1.data());
    avx2_backend().row(spec, ts, q, r2.data());
    for (std::size_t i = 0; i < ts.n; ++i)
        CHECK(std::abs(r1[i] - r2[i]) <= 1e-13);
    Vec3 g1 = Vec3::Zero(), g2 = Vec3::Zero();
    const double s1 = scalar_backend().weighted_sum_and_grad(spec, ts, w.data(), q, g1);
    const double s2 = avx2_backend().weighted_sum_and_grad(spec, ts, w.data(), q, g2);
    CHECK(std::abs(s1 - s2) <= 1e-12);
    CHECK(std::isfinite(g2[0]));
    CHECK((g1 - g2).norm() <= 1e-12 * std::max(1.0, g1.norm()));
}

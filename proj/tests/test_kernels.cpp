#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpdf/kernels.hpp"

#include <cmath>
#include <random>

using namespace gpdf;

namespace {

KernelSpec spec_of(KernelFamily f, double l = 0.7, double s2 = 1.3) {
    KernelSpec k;
    k.family = f;
    k.length_scale = l;
    k.signal_variance = s2;
    return k;
}

const KernelFamily kFamilies[] = {KernelFamily::Matern12, KernelFamily::Matern32,
                                  KernelFamily::SquaredExponential};

}  // namespace

TEST_CASE("validate rejects non-positive hyperparameters") {
    KernelSpec k;
    k.length_scale = 0.0;
    CHECK_THROWS_AS(k.validate(), UsageError);
    k.length_scale = 1.0;
    k.signal_variance = -1.0;
    CHECK_THROWS_AS(k.validate(), UsageError);
    k.signal_variance = 1.0;
    k.loggpis_rate = 0.0;
    CHECK_THROWS_AS(k.validate(), UsageError);
}

TEST_CASE("closed forms at hand-computed points") {
    // Matern 1/2: s2 * exp(-r/l)
    auto m12 = spec_of(KernelFamily::Matern12, 2.0, 1.0);
    CHECK(kernel_of_distance(m12, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    // SE: s2 * exp(-r^2 / (2 l^2))
    auto se = spec_of(KernelFamily::SquaredExponential, 1.0, 1.0);
    CHECK(kernel_of_distance(se, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    // Matern 3/2 at r = l/sqrt(3): (1+1) e^{-1}
    auto m32 = spec_of(KernelFamily::Matern32, std::sqrt(3.0), 1.0);
    CHECK(kernel_of_distance(m32, 1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("kernel is sigma^2 at zero separation and strictly decreasing") {
    for (auto f : kFamilies) {
        auto k = spec_of(f);
        CHECK(kernel_of_distance(k, 0.0) == doctest::Approx(k.signal_variance));
        double prev = kernel_of_distance(k, 0.0);
        for (double r = 0.05; r < 3.0; r += 0.05) {
            const double v = kernel_of_distance(k, r);
            CHECK(v < prev);
            CHECK(v > 0.0);
            prev = v;
        }
    }
}

TEST_CASE("kernel_eval matches the scalar form on the separation") {
    const Vec3 a{0.3, -1.1, 0.4}, b{-0.2, 0.7, 1.0};
    for (auto f : kFamilies) {
        auto k = spec_of(f);
        CHECK(kernel_eval(k, a, b, 3) ==
              doctest::Approx(kernel_of_distance(k, (a - b).norm())).epsilon(1e-14));
        Vec3 a2{a[0], a[1], 0.0}, b2{b[0], b[1], 0.0};
        CHECK(kernel_eval(k, a2, b2, 2) ==
              doctest::Approx(kernel_of_distance(k, (a2 - b2).norm())).epsilon(1e-14));
    }
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const double h = 1e-6;
    for (auto f : kFamilies) {
        auto k = spec_of(f);
        for (int t = 0; t < 30; ++t) {
            Vec3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
            if ((a - b).norm() < 0.1) continue;
            const Vec3 g = kernel_grad_x(k, a, b, 3);
            for (int ax = 0; ax < 3; ++ax) {
                Vec3 ap = a, am = a;
                ap[ax] += h;
                am[ax] -= h;
                const double fd =
                    (kernel_eval(k, ap, b, 3) - kernel_eval(k, am, b, 3)) / (2 * h);
                CHECK(g[ax] == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("gradient is antisymmetric in its arguments") {
    const Vec3 a{0.4, 0.9, -0.3}, b{-0.5, 0.2, 0.8};
    for (auto f : kFamilies) {
        auto k = spec_of(f);
        const Vec3 g1 = kernel_grad_x(k, a, b, 3);
        const Vec3 g2 = kernel_grad_x(k, b, a, 3);
        CHECK((g1 + g2).norm() < 1e-14);
    }
}

TEST_CASE("Matern12 gradient at coincident points is the zero vector") {
    auto k = spec_of(KernelFamily::Matern12);
    const Vec3 a{0.1, 0.2, 0.3};
    CHECK(kernel_grad_x(k, a, a, 3).norm() == 0.0);
}

TEST_CASE("reverting_distance round-trips the kernel over random hyperparameters") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ul(0.1, 3.0), us(0.2, 5.0), ur(0.0, 2.5);
    for (auto f : kFamilies) {
        for (int draw = 0; draw < 50; ++draw) {
            auto k = spec_of(f, ul(rng), us(rng));
            const double r = ur(rng) * k.length_scale;
            const double o = kernel_of_distance(k, r);
            const auto rv = reverting_distance(k, o);
            CHECK(std::abs(rv.distance - r) < 1e-7 * (1.0 + r));
        }
    }
}

TEST_CASE("reverting derivative is the inverse-function derivative") {
    for (auto f : kFamilies) {
        auto k = spec_of(f);
        for (double r : {0.3, 0.9, 1.7}) {
            const double o = kernel_of_distance(k, r);
            const auto rv = reverting_distance(k, o);
            const double h = 1e-7;
            const double fd = (reverting_distance(k, o + h).distance -
                               reverting_distance(k, o - h).distance) /
                              (2 * h);
            CHECK(rv.derivative == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("reverting clamps occupancy above sigma^2 and below the floor") {
    for (auto f : kFamilies) {
        auto k = spec_of(f);
        auto high = reverting_distance(k, k.signal_variance * 1.5);
        CHECK(high.distance == 0.0);
        CHECK(high.derivative == 0.0);
        auto low = reverting_distance(k, 0.0);
        CHECK(std::isfinite(low.distance));
        CHECK(low.distance ==
              reverting_distance(k, occupancy_floor(k) * 0.5).distance);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

#include <cmath>

using namespace gpdf;
using namespace gpdf::testutil;

namespace {

PointCloud one_point() {
    PointCloud c;
    c.dim = 2;
    c.points.emplace_back(0.0, 0.0, 0.0);
    return c;
}

FieldConfig reverting_se(double l) {
    FieldConfig cfg;
    cfg.variant = FieldVariant::Reverting;
    cfg.kernel.family = KernelFamily::SquaredExponential;
    cfg.kernel.length_scale = l;
    return cfg;
}

FieldConfig loggpis_m12(double lambda) {
    FieldConfig cfg;
    cfg.variant = FieldVariant::LogGpis;
    cfg.kernel.family = KernelFamily::Matern12;
    cfg.kernel.loggpis_rate = lambda;
    cfg.kernel.length_scale = 1.0 / lambda;
    return cfg;
}

}  // namespace

TEST_CASE("config validation rejects inconsistent log-gpis length scales") {
    FieldConfig cfg = loggpis_m12(10.0);
    cfg.kernel.length_scale = 0.5;  // != 1/lambda
    CHECK_THROWS_AS(cfg.validate(), UsageError);
    cfg = loggpis_m12(10.0);
    cfg.kernel.family = KernelFamily::SquaredExponential;
    CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("single-point field is near-exact for both variants") {
    auto cloud = one_point();
    FieldConfig rv = reverting_se(1.0);
    rv.noise_variance = 0.0;
    FieldConfig lg = loggpis_m12(10.0);
    lg.noise_variance = 0.0;
    for (const auto& cfg : {rv, lg}) {
        Field f = Field::build(cloud, cfg);
        for (int i = 0; i < 40; ++i) {
            const double r = 0.05 + 2.0 * i / 39.0 * cfg.kernel.length_scale;
            const double d = f.query_distance({r, 0.0, 0.0});
            CHECK(std::abs(d - r) < 1e-6);
        }
    }
}

TEST_CASE("median_nn_spacing matches a regular ring") {
    auto cloud = circle_cloud(256);
    const double expected = 2.0 * std::sin(M_PI / 256.0);  // chord between neighbors
    CHECK(median_nn_spacing(cloud) == doctest::Approx(expected).epsilon(1e-9));
    FieldConfig cfg = default_config(FieldVariant::Reverting, cloud);
    CHECK(cfg.kernel.length_scale == doctest::Approx(4.0 * expected).epsilon(1e-9));
}

TEST_CASE("circle field tracks the exact distance in the band") {
    auto cloud = circle_cloud(256);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    CHECK(band_rmse(f, cloud, 0.05, 0.05, 0.5) < 0.02);
}

TEST_CASE("gradient points radially outward around a circle") {
    auto cloud = circle_cloud(256);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    for (double ang : {0.3, 1.4, 2.8, 4.4, 5.9}) {
        const Vec3 dir{std::cos(ang), std::sin(ang), 0.0};
        const Vec3 q = 1.25 * dir;
        FieldSample s = f.query(q);
        REQUIRE(s.valid_gradient);
        const Vec3 gdir = s.gradient.normalized();
        CHECK(gdir.dot(dir) > 0.99);
        CHECK((s.normal + gdir).norm() < 1e-12);  // normal is -grad normalized
    }
}

TEST_CASE("eikonal property holds in the band") {
    auto cloud = circle_cloud(256);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    double sum = 0.0;
    int n = 0;
    for (double r : {1.1, 1.2, 1.3, 1.4}) {
        for (double ang = 0.1; ang < 6.2; ang += 0.35) {
            Vec3 g;
            bool valid = false;
            f.query_distance({r * std::cos(ang), r * std::sin(ang), 0.0}, &g, &valid);
            REQUIRE(valid);
            sum += g.norm();
            ++n;
        }
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("uncertainty grows away from the data") {
    auto cloud = circle_cloud(256);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    const double near = f.query({1.05, 0.0, 0.0}).uncertainty;
    const double far = f.query({1.55, 0.0, 0.0}).uncertainty;
    CHECK(near >= 0.0);
    CHECK(far > near);
}

TEST_CASE("query_batch equals query and reports the offending index") {
    auto cloud = circle_cloud(64);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    const std::vector<Vec3> qs = {{0.5, 0.2, 0}, {1.3, -0.4, 0}};
    auto batch = f.query_batch(qs);
    REQUIRE(batch.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        FieldSample single = f.query(qs[i]);
        CHECK(batch[i].distance == single.distance);
        CHECK(batch[i].gradient == single.gradient);
        CHECK(batch[i].uncertainty == single.uncertainty);
    }
    const std::vector<Vec3> bad = {{0.5, 0.2, 0}, {std::nan(""), 0.0, 0}};
    CHECK_THROWS_WITH_AS(static_cast<void>(f.query_batch(bad)),
                         doctest::Contains("index 1"), UsageError);
}

TEST_CASE("distance is clamped non-negative on the surface") {
    auto cloud = circle_cloud(128);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    for (const auto& p : cloud.points) CHECK(f.query_distance(p) >= 0.0);
}

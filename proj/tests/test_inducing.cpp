#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpdf/inducing.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace gpdf;
using namespace gpdf::testutil;

TEST_CASE("projection from the surface is a fixed point") {
    auto cloud = circle_cloud(256);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    const Vec3 start{std::cos(0.7), std::sin(0.7), 0.0};
    const Vec3 proj = project_to_surface(f, start);
    CHECK((proj - start).norm() < 5e-3);
}

TEST_CASE("projection walks radial offsets back to the circle") {
    auto cloud = circle_cloud(256);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    for (double r : {1.3, 1.15, 0.85}) {
        for (double ang : {0.4, 2.1, 3.9, 5.5}) {
            const Vec3 x{r * std::cos(ang), r * std::sin(ang), 0.0};
            const Vec3 p = project_to_surface(f, x);
            CHECK(std::abs(p.head<2>().norm() - 1.0) < 1e-2);
            CHECK(std::abs(f.query_distance(p)) < 1e-3);
        }
    }
}

TEST_CASE("selection respects spacing, budget, and residual bound") {
    auto cloud = circle_cloud(256);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    const double s = 0.15;
    PseudoSet set = select_pseudo_points(f, cloud.points, s, 40);
    REQUIRE(!set.points.empty());
    CHECK(set.points.size() <= 40);
    CHECK(set.spacing == s);
    REQUIRE(set.residuals.size() == set.points.size());
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        CHECK(set.residuals[i] < 1e-2);
        CHECK(std::abs(f.query_distance(set.points[i])) < 1e-2);
        for (std::size_t j = i + 1; j < set.points.size(); ++j)
            CHECK((set.points[i] - set.points[j]).norm() >= s);
    }
    // packing bound: circumference 2*pi over spacing
    CHECK(set.points.size() <= static_cast<std::size_t>(2.0 * M_PI / s) + 1);
}

TEST_CASE("selection reports when nothing projects") {
    auto cloud = circle_cloud(64);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    // the center has an invalid (near-zero) gradient; projection cannot start
    CHECK_THROWS_AS(
        static_cast<void>(select_pseudo_points(f, {Vec3{0.0, 0.0, 0.0}}, 0.1, 10)),
        NumericError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpdf/odometry.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace gpdf;
using namespace gpdf::testutil;

TEST_CASE("pose group laws hold in 2D") {
    Pose a = Pose::from_2d(0.4, -0.2, 0.3);
    Pose b = Pose::from_2d(-1.0, 0.5, -0.7);
    Pose ab = a.compose(b);
    const Vec3 p{0.3, 0.8, 0.0};
    CHECK((ab.apply(p) - a.apply(b.apply(p))).norm() < 1e-14);
    Pose inv = a.inverse();
    CHECK((inv.apply(a.apply(p)) - p).norm() < 1e-13);
    CHECK(a.angle_2d() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("rodrigues matches small-angle and quarter-turn rotations") {
    CHECK((rodrigues(Vec3::Zero()) - Eigen::Matrix3d::Identity()).norm() < 1e-15);
    const Eigen::Matrix3d R = rodrigues({0.0, 0.0, M_PI / 2.0});
    CHECK((R * Vec3{1, 0, 0} - Vec3{0, 1, 0}).norm() < 1e-12);
}

TEST_CASE("left increment matches a first-order twist") {
    Pose T = Pose::from_2d(1.0, 2.0, 0.5);
    Eigen::VectorXd xi(3);
    xi << 1e-6, -2e-6, 3e-6;
    Pose T2 = apply_left_increment(xi, T);
    const Vec3 p{0.7, -0.4, 0.0};
    const Vec3 moved = T2.apply(p);
    const Vec3 base = T.apply(p);
    // first order: delta = v + omega x (T p)
    const Vec3 expect = base + Vec3{xi[0], xi[1], 0.0} +
                        Vec3{-xi[2] * base[1], xi[2] * base[0], 0.0};
    CHECK((moved - expect).norm() < 1e-10);  // second-order remainder
}

TEST_CASE("registration at the answer stays at the answer") {
    auto cloud = l_shape_cloud(300);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    auto rep = register_scan(f, cloud, Pose::identity(2));
    CHECK(rep.pose.translation.norm() < 1e-3);
    CHECK(std::abs(rep.pose.angle_2d()) < 1e-3);
    CHECK(rep.final_rmse <= rep.initial_rmse + 1e-12);
}

TEST_CASE("registration recovers random 2D perturbations") {
    auto cloud = l_shape_cloud(300);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ut(-0.15, 0.15), ua(-0.15, 0.15);
    for (int t = 0; t < 5; ++t) {
        const Pose offset = Pose::from_2d(ut(rng), ut(rng), ua(rng));
        PointCloud scan = cloud;
        for (auto& p : scan.points) p = offset.inverse().apply(p);
        auto rep = register_scan(f, scan, Pose::identity(2));
        CHECK(rep.iterations <= 50);
        CHECK((rep.pose.translation - offset.translation).norm() < 5e-3);
        CHECK(std::abs(rep.pose.angle_2d() - offset.angle_2d()) < 0.5 * M_PI / 180.0);
    }
}

TEST_CASE("too few usable residuals is reported as a numeric failure") {
    auto cloud = l_shape_cloud(100);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    PointCloud scan;
    scan.dim = 2;
    scan.points.emplace_back(0.5, 0.5, 0.0);  // a single point cannot constrain a pose
    CHECK_THROWS_AS(static_cast<void>(register_scan(f, scan, Pose::identity(2))),
                    NumericError);
}

TEST_CASE("submap-backed registration agrees with the field-backed one") {
    auto cloud = l_shape_cloud(300);
    FieldConfig fc = default_config(FieldVariant::Reverting, cloud);
    Field f = Field::build(cloud, fc);
    SubmapConfig sc = SubmapConfig::for_field(fc);
    sc.block_size = 100.0;  // one block: identical model
    sc.downsample_resolution = 0.0;
    sc.max_points_per_block = 1000;
    SubmapGrid grid(sc, 2);
    grid.insert_points(cloud, Pose::identity(2));

    const Pose offset = Pose::from_2d(0.05, -0.08, 0.06);
    PointCloud scan = cloud;
    for (auto& p : scan.points) p = offset.inverse().apply(p);
    auto ra = register_scan(f, scan, Pose::identity(2));
    auto rb = register_scan(grid, scan, Pose::identity(2));
    CHECK((ra.pose.translation - rb.pose.translation).norm() < 1e-9);
    CHECK(std::abs(ra.pose.angle_2d() - rb.pose.angle_2d()) < 1e-9);
}

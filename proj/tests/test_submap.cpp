#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpdf/submap.hpp"
#include "test_util.hpp"

#include <cstdio>

using namespace gpdf;
using namespace gpdf::testutil;

namespace {

SubmapConfig circle_grid_config(const PointCloud& cloud, double block_size) {
    FieldConfig f = default_config(FieldVariant::Reverting, cloud);
    SubmapConfig cfg = SubmapConfig::for_field(f);
    cfg.block_size = block_size;
    cfg.halo_margin = 4.0 * f.kernel.length_scale;
    return cfg;
}

}  // namespace

TEST_CASE("block_of floors coordinates, including negatives and boundaries") {
    auto cloud = circle_cloud(16);
    SubmapConfig cfg = circle_grid_config(cloud, 1.0);
    SubmapGrid grid(cfg, 2);
    CHECK(grid.block_of({0.5, 0.5, 0}) == BlockCoord{0, 0, 0});
    CHECK(grid.block_of({-0.5, 0.5, 0}) == BlockCoord{-1, 0, 0});
    CHECK(grid.block_of({1.0, -1.0, 0}) == BlockCoord{1, -1, 0});
    CHECK(grid.block_of({-2.0, 0.0, 0}) == BlockCoord{-2, 0, 0});
}

TEST_CASE("insert partitions points across blocks and skips non-finite ones") {
    auto cloud = circle_cloud(64);
    cloud.points.emplace_back(std::nan(""), 0.0, 0.0);
    SubmapGrid grid(circle_grid_config(cloud, 1.0), 2);
    auto stats = grid.insert_points(cloud, Pose::identity(2));
    CHECK(stats.points_skipped == 1);
    CHECK(stats.points_added <= 64);
    std::size_t total = grid.total_points();
    CHECK(total == stats.points_added);
    // unit circle straddles the quadrant blocks (boundary points may land in
    // blocks of their own)
    CHECK(grid.block_count() >= 4);
    CHECK(grid.block_count() <= 6);
}

TEST_CASE("voxel downsampling makes re-insertion a no-op") {
    auto cloud = circle_cloud(64);
    SubmapConfig cfg = circle_grid_config(cloud, 1.0);
    REQUIRE(cfg.downsample_resolution > 0.0);
    SubmapGrid grid(cfg, 2);
    auto first = grid.insert_points(cloud, Pose::identity(2));
    auto second = grid.insert_points(cloud, Pose::identity(2));
    CHECK(first.points_added > 0);
    CHECK(second.points_added == 0);
}

TEST_CASE("a single-block grid matches a monolithic field bit-for-bit") {
    // centered inside one 100 m block so no coordinate crosses a boundary
    auto cloud = circle_cloud(128, 1.0, 50.0, 50.0);
    SubmapConfig cfg = circle_grid_config(cloud, 100.0);
    cfg.downsample_resolution = 0.0;
    cfg.max_points_per_block = 1000;
    SubmapGrid grid(cfg, 2);
    grid.insert_points(cloud, Pose::identity(2));
    REQUIRE(grid.block_count() == 1);
    Field mono = Field::build(cloud, cfg.field);
    for (const Vec3 q : {Vec3{50.3, 50.2, 0}, Vec3{51.4, 49.1, 0}, Vec3{49.3, 50.6, 0}}) {
        FieldSample a = grid.query_fused(q);
        FieldSample b = mono.query(q);
        CHECK(a.distance == b.distance);
        CHECK(a.gradient == b.gradient);
        CHECK(a.uncertainty == b.uncertainty);
    }
}

TEST_CASE("interior fused queries match the owning block's own answer") {
    // two clusters far apart relative to the block size: near either one,
    // only its own block is in fusion range, so the single-member bypass
    // makes the fused answer bit-identical to the owner's
    auto cloud = circle_cloud(64, 0.3, 0.5, 0.5);
    auto other = circle_cloud(64, 0.3, 20.5, 0.5);
    cloud.points.insert(cloud.points.end(), other.points.begin(), other.points.end());
    SubmapConfig cfg = circle_grid_config(cloud, 1.0);
    cfg.downsample_resolution = 0.0;
    SubmapGrid grid(cfg, 2);
    grid.insert_points(cloud, Pose::identity(2));
    for (const Vec3 q : {Vec3{0.5, 0.5, 0}, Vec3{20.6, 0.4, 0}}) {
        FieldSample fused = grid.query_fused(q);
        FieldSample own = grid.query_block(grid.block_of(q), q);
        CHECK(fused.distance == own.distance);
        CHECK(fused.gradient == own.gradient);
    }
}

TEST_CASE("four-block fusion stays close to the monolithic field") {
    auto cloud = circle_cloud(256);
    SubmapConfig cfg = circle_grid_config(cloud, 1.0);
    cfg.downsample_resolution = 0.0;
    cfg.max_points_per_block = 1000;
    SubmapGrid grid(cfg, 2);
    grid.insert_points(cloud, Pose::identity(2));
    REQUIRE(grid.block_count() >= 4);
    Field mono = Field::build(cloud, cfg.field);

    double se_fused = 0.0, se_mono = 0.0;
    std::size_t n = 0;
    for (double y = -1.55; y <= 1.55; y += 0.1) {
        for (double x = -1.55; x <= 1.55; x += 0.1) {
            const Vec3 q{x, y, 0.0};
            const double dt = brute_force_edf(cloud, q);
            if (dt < 0.05 || dt > 0.5) continue;
            const double ef = grid.query_fused(q).distance - dt;
            const double em = mono.query_distance(q) - dt;
            se_fused += ef * ef;
            se_mono += em * em;
            ++n;
        }
    }
    REQUIRE(n > 50);
    CHECK(std::sqrt(se_fused / n) <= 1.5 * std::sqrt(se_mono / n));
}

TEST_CASE("save/load round-trips queries bit-exactly") {
    auto cloud = circle_cloud(128);
    SubmapConfig cfg = circle_grid_config(cloud, 1.0);
    SubmapGrid grid(cfg, 2);
    grid.insert_points(cloud, Pose::identity(2));
    const char* path = "submap_roundtrip.bin";
    grid.save(path);
    SubmapGrid loaded = SubmapGrid::load(path);
    std::remove(path);
    CHECK(loaded.block_count() == grid.block_count());
    CHECK(loaded.total_points() == grid.total_points());
    for (const Vec3 q : {Vec3{0.2, 0.4, 0}, Vec3{-1.3, 0.8, 0}, Vec3{1.1, 1.1, 0}}) {
        FieldSample a = grid.query_fused(q);
        FieldSample b = loaded.query_fused(q);
        CHECK(a.distance == b.distance);
        CHECK(a.gradient == b.gradient);
        CHECK(a.uncertainty == b.uncertainty);
    }
}

TEST_CASE("insert applies the sensor pose") {
    PointCloud scan;  // scan-frame points on a line x' in [0,1]
    scan.dim = 2;
    for (int i = 0; i < 10; ++i) scan.points.emplace_back(0.1 * i, 0.0, 0.0);
    SubmapConfig cfg = circle_grid_config(scan, 10.0);
    cfg.downsample_resolution = 0.0;
    SubmapGrid grid(cfg, 2);
    grid.insert_points(scan, Pose::from_2d(5.0, 0.0, M_PI / 2.0));
    const auto* pts = grid.block_points(grid.block_of({5.0, 0.5, 0.0}));
    REQUIRE(pts != nullptr);
    // rotated 90deg then shifted: points run up the line x = 5
    for (const auto& p : *pts) CHECK(p[0] == doctest::Approx(5.0).epsilon(1e-12));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpdf/mesher.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>

using namespace gpdf;
using namespace gpdf::testutil;

namespace {

GridSpec cube_grid(double half, double cell, double iso) {
    GridSpec g;
    g.bbox_min = Vec3{-half, -half, -half};
    g.bbox_max = Vec3{half, half, half};
    g.cell = cell;
    g.iso = iso;
    return g;
}

}  // namespace

TEST_CASE("grid validation") {
    GridSpec g = cube_grid(1.0, 0.1, 0.1);
    g.bbox_max[0] = -2.0;
    CHECK_THROWS_AS(g.validate(3), UsageError);
    g = cube_grid(1.0, -0.1, 0.1);
    CHECK_THROWS_AS(g.validate(3), UsageError);
    g = cube_grid(1.0, 1e-6, 0.1);
    CHECK_THROWS_AS(extract_isosurface_3d([](const Vec3&) { return 1.0; }, g),
                    UsageError);  // too many cells
}

TEST_CASE("analytic sphere distance meshes to the offset shell") {
    // exact unsigned distance to the unit sphere surface
    auto d = [](const Vec3& p) { return std::abs(p.norm() - 1.0); };
    GridSpec g = cube_grid(1.4, 0.1, 0.1);
    TriangleMesh m = extract_isosurface_3d(d, g);
    REQUIRE(!m.vertices.empty());
    REQUIRE(!m.triangles.empty());
    for (const auto& v : m.vertices) {
        const double r = v.norm();
        // shell at 1 +/- iso, linear interpolation error bounded by the cell
        CHECK((std::abs(r - 0.9) < 0.05 || std::abs(r - 1.1) < 0.05));
    }
    for (const auto& t : m.triangles) {
        CHECK(t[0] != t[1]);
        CHECK(t[1] != t[2]);
        CHECK(t[0] != t[2]);
        for (int c : t) CHECK(c < static_cast<int>(m.vertices.size()));
    }
}

TEST_CASE("a field entirely above the iso level produces an empty mesh") {
    auto d = [](const Vec3&) { return 5.0; };
    TriangleMesh m = extract_isosurface_3d(d, cube_grid(1.0, 0.25, 0.1));
    CHECK(m.vertices.empty());
    CHECK(m.triangles.empty());
}

TEST_CASE("gp sphere field meshes near the sphere") {
    auto cloud = sphere_cloud(400);
    Field f = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    GridSpec g = cube_grid(1.3, 0.1, 0.1);
    TriangleMesh m = extract_isosurface_3d(f, g);
    REQUIRE(!m.vertices.empty());
    for (const auto& v : m.vertices) CHECK(std::abs(v.norm() - 1.0) < 0.25);
}

TEST_CASE("meshing is deterministic under cloud reordering") {
    auto cloud = sphere_cloud(200);
    PointCloud shuffled = cloud;
    std::reverse(shuffled.points.begin(), shuffled.points.end());
    FieldConfig cfg = default_config(FieldVariant::Reverting, cloud);
    Field fa = Field::build(cloud, cfg);
    Field fb = Field::build(shuffled, cfg);
    GridSpec g = cube_grid(1.3, 0.15, 0.15);
    TriangleMesh ma = extract_isosurface_3d(fa, g);
    TriangleMesh mb = extract_isosurface_3d(fb, g);
    REQUIRE(ma.vertices.size() == mb.vertices.size());
    REQUIRE(ma.triangles.size() == mb.triangles.size());
    for (std::size_t i = 0; i < ma.vertices.size(); ++i)
        CHECK((ma.vertices[i] - mb.vertices[i]).norm() < 1e-9);
    for (std::size_t i = 0; i < ma.triangles.size(); ++i)
        CHECK(ma.triangles[i] == mb.triangles[i]);
}

TEST_CASE("2d contour of a circle closes at the offset radii") {
    auto d = [](const Vec3& p) { return std::abs(p.head<2>().norm() - 1.0); };
    GridSpec g;
    g.bbox_min = Vec3{-1.5, -1.5, 0.0};
    g.bbox_max = Vec3{1.5, 1.5, 1.0};
    g.cell = 0.05;
    g.iso = 0.2;
    auto lines = extract_contour_2d(d, g);
    REQUIRE(lines.size() == 2);  // inner and outer offset circles
    double total_len = 0.0;
    for (const auto& line : lines) {
        REQUIRE(line.size() > 8);
        // closed loop: chained back to its start
        CHECK((line.front() - line.back()).norm() < 1e-9);
        const double r = line[line.size() / 2].head<2>().norm();
        CHECK((std::abs(r - 0.8) < 0.03 || std::abs(r - 1.2) < 0.03));
        for (std::size_t i = 1; i < line.size(); ++i)
            total_len += (line[i] - line[i - 1]).norm();
    }
    const double expected = 2.0 * M_PI * (0.8 + 1.2);
    CHECK(total_len == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("dimension mismatches are rejected") {
    auto cloud = circle_cloud(32);
    Field f2 = Field::build(cloud, default_config(FieldVariant::Reverting, cloud));
    CHECK_THROWS_AS(static_cast<void>(extract_isosurface_3d(f2, cube_grid(1, 0.2, 0.1))),
                    UsageError);
}

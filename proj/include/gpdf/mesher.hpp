#pragma once

#include "gpdf/odometry.hpp"

#include <array>
#include <functional>

namespace gpdf {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
};

struct GridSpec {
    Vec3 bbox_min = Vec3::Zero();
    Vec3 bbox_max = Vec3::Ones();
    double cell = 0.05;  // h, meters
    double iso = 0.05;   // tau, meters; > 0 (offset shell of the unsigned field)

    void validate(int dim) const;
};

using ScalarFieldFn = std::function<double(const Vec3&)>;

// Marching cubes over v(x) = d(x) - tau. The field is unsigned, so the
// result is a closed shell at offset tau around the surface. Triangle
// emission order is deterministic (cell raster order).
TriangleMesh extract_isosurface_3d(const ScalarFieldFn& distance, const GridSpec& grid);
TriangleMesh extract_isosurface_3d(const Field& field, const GridSpec& grid);

// Marching squares analogue; saddle cells are disambiguated with a
// cell-center sample. Segments are chained into polylines.
std::vector<std::vector<Vec3>> extract_contour_2d(const ScalarFieldFn& distance,
                                                  const GridSpec& grid);
std::vector<std::vector<Vec3>> extract_contour_2d(const Field& field,
                                                  const GridSpec& grid);

namespace detail {
extern const int kMcEdgeTable[256];
extern const int kMcTriTable[256][16];
}  // namespace detail

}  // namespace gpdf

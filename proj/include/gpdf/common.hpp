#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpdf {

using Vec3 = Eigen::Vector3d;

// Thrown on invalid arguments / malformed input (CLI exit code 1).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on numerical failure (CLI exit code 2).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ordered set of surface samples. 2D clouds keep z == 0.
struct PointCloud {
    int dim = 0;  // 2 or 3
    std::vector<Vec3> points;
    std::string source_id;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

inline void check_dim(int dim) {
    if (dim != 2 && dim != 3) throw UsageError("point dimension must be 2 or 3");
}

inline void check_finite(const Vec3& p, int dim) {
    for (int a = 0; a < dim; ++a)
        if (!std::isfinite(p[a])) throw UsageError("non-finite coordinate");
}

}  // namespace gpdf

#pragma once

#include "gpdf/common.hpp"

#include <Eigen/Geometry>

namespace gpdf {

// Rigid transform. 2D poses embed as rotation about z with t.z == 0.
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Vec3 translation = Vec3::Zero();
    int dim = 3;

    static Pose identity(int dim) {
        Pose p;
        p.dim = dim;
        return p;
    }
    static Pose from_2d(double tx, double ty, double theta);

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Pose compose(const Pose& other) const;  // this * other
    Pose inverse() const;

    // 2D rotation angle about z, radians.
    double angle_2d() const { return std::atan2(rotation(1, 0), rotation(0, 0)); }
};

// Closed-form exponential map of a twist, left-composed onto a pose:
// returns exp(xi) * T. 2D twists are (vx, vy, omega); 3D are
// (vx, vy, vz, wx, wy, wz) with Rodrigues for the rotation part.
Pose apply_left_increment(const Eigen::VectorXd& xi, const Pose& T);

Eigen::Matrix3d rodrigues(const Vec3& omega);

}  // namespace gpdf

#include "gpdf/pose.hpp"

#include <cmath>

namespace gpdf {

Pose Pose::from_2d(double tx, double ty, double theta) {
    Pose p;
    p.dim = 2;
    const double c = std::cos(theta), s = std::sin(theta);
    p.rotation << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
    p.translation = {tx, ty, 0.0};
    return p;
}

Pose Pose::compose(const Pose& other) const {
    Pose p;
    p.dim = dim;
    p.rotation = rotation * other.rotation;
    p.translation = rotation * other.translation + translation;
    return p;
}

Pose Pose::inverse() const {
    Pose p;
    p.dim = dim;
    p.rotation = rotation.transpose();
    p.translation = -p.rotation * translation;
    return p;
}

Eigen::Matrix3d rodrigues(const Vec3& omega) {
    const double th = omega.norm();
    if (th < 1e-12) {
        Eigen::Matrix3d K;
        K << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;
        return Eigen::Matrix3d::Identity() + K;  // first-order for tiny angles
    }
    const Vec3 a = omega / th;
    Eigen::Matrix3d K;
    K << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
    return Eigen::Matrix3d::Identity() + std::sin(th) * K +
           (1.0 - std::cos(th)) * (K * K);
}

Pose apply_left_increment(const Eigen::VectorXd& xi, const Pose& T) {
    Pose out;
    out.dim = T.dim;
    Eigen::Matrix3d R;
    Vec3 v;
    if (T.dim == 2) {
        if (xi.size() != 3) throw UsageError("2D twist must have 3 components");
        R = rodrigues({0.0, 0.0, xi[2]});
        v = {xi[0], xi[1], 0.0};
    } else {
        if (xi.size() != 6) throw UsageError("3D twist must have 6 components");
        R = rodrigues({xi[3], xi[4], xi[5]});
        v = {xi[0], xi[1], xi[2]};
    }
    out.rotation = R * T.rotation;
    out.translation = R * T.translation + v;
    return out;
}

}  // namespace gpdf

#include "pixgrasp/geometry.hpp"

#include "pixgrasp/errors.hpp"

#include <cmath>

namespace pixgrasp {

Pose Pose::compose(const Pose& other) const {
    Pose out;
    out.orientation = (orientation * other.orientation).normalized();
    out.position = orientation * other.position + position;
    return out;
}

Pose Pose::inverse() const {
    Pose out;
    out.orientation = orientation.conjugate();
    out.position = -(out.orientation * position);
    return out;
}

Quat canonical(const Quat& q) {
    Quat n = q.normalized();
    if (n.w() < 0.0) n.coeffs() = -n.coeffs();
    return n;
}

Quat quat_from_euler_zyx(double yaw, double pitch, double roll) {
    const double cy = std::cos(0.5 * yaw), sy = std::sin(0.5 * yaw);
    const double cp = std::cos(0.5 * pitch), sp = std::sin(0.5 * pitch);
    const double cr = std::cos(0.5 * roll), sr = std::sin(0.5 * roll);
    // qz(yaw) * qy(pitch) * qx(roll), expanded.
    Quat q(cy * cp * cr + sy * sp * sr,
           cy * cp * sr - sy * sp * cr,
           cy * sp * cr + sy * cp * sr,
           sy * cp * cr - cy * sp * sr);
    return q.normalized();
}

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& world_up) {
    const Vec3 diff = target - eye;
    const double dist = diff.norm();
    if (!(dist > 1e-12)) throw ValidationError("look_at: eye and target coincide");
    const Vec3 forward = diff / dist;
    const Vec3 right_raw = forward.cross(world_up);
    const double rn = right_raw.norm();
    if (!(rn > 1e-9 * world_up.norm())) {
        throw ValidationError("look_at: viewing direction is parallel to the up vector");
    }
    const Vec3 right = right_raw / rn;
    const Vec3 down = forward.cross(right);

    Mat3 r;
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = forward;
    Pose pose;
    pose.position = eye;
    pose.orientation = canonical(Quat(r));
    return pose;
}

}  // namespace pixgrasp

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace pixgrasp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// World frame is Z-up with the ground plane at z = 0.
inline const Vec3 kWorldUp{0.0, 0.0, 1.0};

/// Rigid transform mapping points from a local frame into the parent frame.
struct Pose {
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();

    static Pose identity() { return {}; }

    Mat3 rotation() const { return orientation.toRotationMatrix(); }
    Vec3 transform_point(const Vec3& p) const { return orientation * p + position; }
    Vec3 rotate(const Vec3& v) const { return orientation * v; }

    /// (*this) ∘ other: apply `other` first, then this pose.
    Pose compose(const Pose& other) const;
    Pose inverse() const;
};

/// Returns q normalized and flipped so that w >= 0.
Quat canonical(const Quat& q);

/// Quaternion for the intrinsic Z-Y-X sequence: Rz(yaw) * Ry(pitch) * Rx(roll).
Quat quat_from_euler_zyx(double yaw, double pitch, double roll);

/// Camera pose looking from `eye` at `target`. Camera frame is +Z forward,
/// +X right, +Y down. Throws ValidationError for eye == target or when the
/// viewing direction is parallel to `world_up`.
Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& world_up = kWorldUp);

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit

    Vec3 at(double t) const { return origin + t * direction; }
};

}  // namespace pixgrasp

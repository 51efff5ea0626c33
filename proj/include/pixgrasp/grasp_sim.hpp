#pragma once

#include "pixgrasp/accel.hpp"
#include "pixgrasp/camera.hpp"
#include "pixgrasp/raster.hpp"
#include "pixgrasp/render.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pixgrasp {

/// Parametric parallel-jaw gripper in its own frame: +X approach (toward the
/// object), +Y jaw axis, +Z palm normal. The gripper origin sits
/// `finger_reach` behind the fingertips; the palm is directly behind the
/// fingers. Each finger is a box whose inner face lies at y = +-aperture/2.
struct GripperModel {
    double max_aperture = 0.10;
    double finger_length = 0.05;     // along X
    double finger_thickness = 0.01;  // along Y
    double finger_width = 0.02;      // along Z
    double palm_depth = 0.04;        // along X
    double palm_width = 0.08;        // along Y
    double palm_height = 0.06;       // along Z
    double finger_reach = 0.38;      // origin -> fingertip along X
    int pad_points_per_finger = 5;
    int contact_min = 1;
    double penetration_tolerance = 0.001;

    void validate() const;

    /// Contact sample points on the inner pad of one finger (side = +1 or -1),
    /// gripper frame, spread along the finger length at z = 0.
    std::vector<Vec3> pad_points(int side, double aperture) const;

    OrientedBox palm_box(const Pose& gripper_pose) const;
    OrientedBox finger_box(const Pose& gripper_pose, int side, double aperture) const;
};

struct GraspConfig {
    double surface_offset = 0.35;    // surface -> gripper origin
    double staging_distance = 1.0;   // pre-grasp standoff, recorded only
};

struct GraspPose {
    PixelCoord pixel;
    Vec3 surface_point = Vec3::Zero();  // world
    Vec3 normal = Vec3::Zero();         // world, unit, outward
    Pose gripper_pose;                  // gripper -> world
    double staging_distance = 1.0;
    double surface_offset = 0.35;

    Vec3 approach_axis() const { return gripper_pose.rotate(Vec3::UnitX()); }
    Vec3 jaw_axis() const { return gripper_pose.rotate(Vec3::UnitY()); }
    Vec3 staging_position() const { return surface_point + staging_distance * normal; }
};

enum class FailureReason : std::uint8_t {
    None = 0,
    NoFingerContact = 1,
    OneFingerContact = 2,
    ExternalCollision = 3,
    ApertureExceeded = 4,
};

std::string to_string(FailureReason reason);

struct GraspOutcome {
    bool success = false;
    FailureReason failure_reason = FailureReason::NoFingerContact;
};

/// Number of pad rays per finger (index 0: +Y finger, 1: -Y finger) that reach
/// the target within the closing travel.
struct SweepResult {
    std::array<int, 2> pad_hits{0, 0};

    bool finger_contact(int finger, int contact_min) const { return pad_hits[finger] >= contact_min; }
};

/// Jaw axis for an approach direction: normalize(world_up x approach); when
/// that is shorter than 1e-6 the projection of `fallback_right` orthogonal to
/// the approach is used. The sign is chosen to have a positive dot with
/// world +X, or with +Y when the +X dot vanishes.
Vec3 jaw_axis_for(const Vec3& approach, const Vec3& fallback_right);

/// Rotation whose columns are (approach, jaw, approach x jaw).
Mat3 grasp_rotation(const Vec3& approach, const Vec3& jaw);

/// Builds the grasp for one object pixel of a rendered view.
/// Throws ValidationError when the pixel is not on `target_id` and
/// InvalidDepthError when it has no depth or normal.
GraspPose plan_grasp_pose(const PixelCoord& pixel, const ViewSample& view, const GripperModel& gripper,
                          const GraspConfig& config, ObjectId target_id);

/// Closing stage alone: each pad point casts along the jaw toward the opposite
/// finger, with travel equal to `aperture`.
SweepResult closing_sweep(const AcceleratedScene& scene, const GraspPose& grasp, const GripperModel& gripper,
                          ObjectId target_id, double aperture);

/// Kinematic grasp check at the final pose. Checks, in order: body boxes
/// against the ground plane and non-target objects (external_collision), the
/// target's chord along the jaw at each pad depth (aperture_exceeded), body
/// penetration into the target beyond the tolerance (external_collision), and
/// finally the closing sweep (both fingers must make contact).
GraspOutcome attempt_grasp(const AcceleratedScene& scene, const GraspPose& grasp, const GripperModel& gripper,
                           ObjectId target_id);

/// Label values: 1 success, 0 failure, -1 indeterminate.
using GraspLabelMap = Raster<std::int8_t>;

/// Code stored in LabelResult::reasons for pixels that were not attempted.
inline constexpr std::uint8_t kNotAttempted = 255;

struct LabelResult {
    GraspLabelMap labels;
    Raster<std::uint8_t> reasons;  // FailureReason per attempted pixel
    std::size_t object_pixels = 0;
    std::size_t sampled_pixels = 0;
    std::size_t positive_pixels = 0;
};

/// Labels every stride-th target pixel (counted in row-major order, starting
/// with the first) by an independent grasp attempt; every other pixel is -1.
/// A view in which the target is not visible yields all -1. Throws
/// ValidationError when the scene has no object `target_id` or stride < 1.
LabelResult label_view(const AcceleratedScene& scene, const ViewSample& view, const GripperModel& gripper,
                       ObjectId target_id, int stride, const GraspConfig& config = {});

}  // namespace pixgrasp

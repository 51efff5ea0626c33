#include "pixgrasp/grasp_sim.hpp"

#include "pixgrasp/errors.hpp"
#include "pixgrasp/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace pixgrasp {

namespace {

// Sampling pitch for the body-penetration test; finer than twice the default tolerance.
constexpr double kPenetrationPitch = 0.002;

/// Length of the target chord along `dir` through a point known to be inside.
/// Returns +inf when the ray never leaves the solid (open mesh).
double exit_distance(const AcceleratedScene& scene, const Vec3& p, const Vec3& dir, ObjectId id) {
    int level = 1;
    for (const auto& h : scene.intersect_all(Ray{p, dir}, id)) {
        level += h.front_face ? 1 : -1;
        if (level == 0) return h.t;
    }
    return std::numeric_limits<double>::infinity();
}

bool box_intersects_solid(const AcceleratedScene& scene, const OrientedBox& box, ObjectId id) {
    if (scene.box_touches_surface(box, id)) return true;
    return scene.contains(box.center, id);
}

/// True when some point of the box lies inside the target deeper than `tol`.
bool box_penetrates(const AcceleratedScene& scene, const OrientedBox& box, ObjectId id, double tol) {
    if (!scene.box_touches_surface(box, id)) {
        // Entirely inside or entirely outside.
        return scene.contains(box.center, id) && scene.distance_to_surface(box.center, id) > tol;
    }
    std::array<int, 3> steps{};
    for (int k = 0; k < 3; ++k) {
        steps[k] = std::max(1, static_cast<int>(std::ceil(2.0 * box.half_extents[k] / kPenetrationPitch)));
    }
    for (int i = 0; i <= steps[0]; ++i) {
        for (int j = 0; j <= steps[1]; ++j) {
            for (int k = 0; k <= steps[2]; ++k) {
                const Vec3 local(box.half_extents.x() * (2.0 * i / steps[0] - 1.0),
                                 box.half_extents.y() * (2.0 * j / steps[1] - 1.0),
                                 box.half_extents.z() * (2.0 * k / steps[2] - 1.0));
                const Vec3 p = box.center + box.axes * local;
                if (scene.distance_to_surface(p, id) > tol && scene.contains(p, id)) return true;
            }
        }
    }
    return false;
}

}  // namespace

std::string to_string(FailureReason reason) {
    switch (reason) {
        case FailureReason::None: return "none";
        case FailureReason::NoFingerContact: return "no_finger_contact";
        case FailureReason::OneFingerContact: return "one_finger_contact";
        case FailureReason::ExternalCollision: return "external_collision";
        case FailureReason::ApertureExceeded: return "aperture_exceeded";
    }
    return "unknown";
}

void GripperModel::validate() const {
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    if (!positive(max_aperture)) throw ValidationError("gripper: max_aperture must be positive");
    if (!positive(finger_length) || !positive(finger_thickness) || !positive(finger_width)) {
        throw ValidationError("gripper: finger dimensions must be positive");
    }
    if (!positive(palm_depth) || !positive(palm_width) || !positive(palm_height)) {
        throw ValidationError("gripper: palm dimensions must be positive");
    }
    if (!positive(finger_reach) || finger_reach < finger_length + palm_depth) {
        throw ValidationError("gripper: finger_reach must cover the finger and palm depth");
    }
    if (pad_points_per_finger < 1) throw ValidationError("gripper: pad_points_per_finger must be >= 1");
    if (contact_min < 1 || contact_min > pad_points_per_finger) {
        throw ValidationError("gripper: contact_min must be in [1, pad_points_per_finger]");
    }
    if (!(penetration_tolerance >= 0.0)) throw ValidationError("gripper: penetration_tolerance must be >= 0");
}

std::vector<Vec3> GripperModel::pad_points(int side, double aperture) const {
    std::vector<Vec3> pts;
    pts.reserve(pad_points_per_finger);
    for (int k = 0; k < pad_points_per_finger; ++k) {
        const double x = finger_reach - finger_length * (k + 0.5) / pad_points_per_finger;
        pts.emplace_back(x, side * 0.5 * aperture, 0.0);
    }
    return pts;
}

OrientedBox GripperModel::palm_box(const Pose& gripper_pose) const {
    OrientedBox box;
    box.axes = gripper_pose.rotation();
    box.center = gripper_pose.transform_point(Vec3(finger_reach - finger_length - 0.5 * palm_depth, 0.0, 0.0));
    box.half_extents = Vec3(0.5 * palm_depth, 0.5 * palm_width, 0.5 * palm_height);
    return box;
}

OrientedBox GripperModel::finger_box(const Pose& gripper_pose, int side, double aperture) const {
    OrientedBox box;
    box.axes = gripper_pose.rotation();
    box.center = gripper_pose.transform_point(
        Vec3(finger_reach - 0.5 * finger_length, side * (0.5 * aperture + 0.5 * finger_thickness), 0.0));
    box.half_extents = Vec3(0.5 * finger_length, 0.5 * finger_thickness, 0.5 * finger_width);
    return box;
}

Vec3 jaw_axis_for(const Vec3& approach, const Vec3& fallback_right) {
    Vec3 jaw = kWorldUp.cross(approach);
    if (jaw.norm() < 1e-6) {
        jaw = fallback_right - fallback_right.dot(approach) * approach;
        if (jaw.norm() < 1e-6) {
            // Fallback is itself parallel to the approach; any horizontal axis works.
            jaw = Vec3::UnitX() - approach.x() * approach;
        }
    }
    jaw.normalize();
    const double dx = jaw.dot(Vec3::UnitX());
    if (dx < -1e-12 || (std::abs(dx) <= 1e-12 && jaw.y() < 0.0)) jaw = -jaw;
    return jaw;
}

Mat3 grasp_rotation(const Vec3& approach, const Vec3& jaw) {
    Mat3 r;
    r.col(0) = approach;
    r.col(1) = jaw;
    r.col(2) = approach.cross(jaw);
    return r;
}

GraspPose plan_grasp_pose(const PixelCoord& pixel, const ViewSample& view, const GripperModel& gripper,
                          const GraspConfig& config, ObjectId target_id) {
    (void)gripper;
    const int u = static_cast<int>(std::lround(pixel.u));
    const int v = static_cast<int>(std::lround(pixel.v));
    if (u < 0 || v < 0 || u >= view.width() || v >= view.height()) {
        throw ValidationError("plan_grasp_pose: pixel outside the image");
    }
    const double depth = view.depth.at(v, u);
    if (!(depth > 0.0)) throw InvalidDepthError("plan_grasp_pose: pixel has no valid depth");
    if (view.segmentation.at(v, u) != target_id) {
        throw ValidationError("plan_grasp_pose: pixel is not on the target object");
    }
    const Vec3 n_cam(view.normals.at(v, u, 0), view.normals.at(v, u, 1), view.normals.at(v, u, 2));
    if (!(n_cam.norm() > 0.5)) throw InvalidDepthError("plan_grasp_pose: pixel has no valid normal");

    GraspPose g;
    g.pixel = PixelCoord{static_cast<double>(u), static_cast<double>(v)};
    g.surface_point = view.camera_pose.transform_point(back_project(g.pixel, depth, view.intrinsics));
    g.normal = view.camera_pose.rotate(n_cam).normalized();
    g.surface_offset = config.surface_offset;
    g.staging_distance = config.staging_distance;

    const Vec3 approach = -g.normal;
    const Vec3 camera_right = view.camera_pose.rotate(Vec3::UnitX());
    const Vec3 jaw = jaw_axis_for(approach, camera_right);
    g.gripper_pose.position = g.surface_point + config.surface_offset * g.normal;
    g.gripper_pose.orientation = canonical(Quat(grasp_rotation(approach, jaw)));
    return g;
}

SweepResult closing_sweep(const AcceleratedScene& scene, const GraspPose& grasp, const GripperModel& gripper,
                          ObjectId target_id, double aperture) {
    SweepResult result;
    const Vec3 jaw = grasp.jaw_axis();
    for (int finger = 0; finger < 2; ++finger) {
        const int side = finger == 0 ? 1 : -1;
        const Vec3 travel_dir = -side * jaw;
        for (const auto& local : gripper.pad_points(side, aperture)) {
            const Ray ray{grasp.gripper_pose.transform_point(local), travel_dir};
            if (scene.raycast(ray, aperture, target_id)) ++result.pad_hits[finger];
        }
    }
    return result;
}

GraspOutcome attempt_grasp(const AcceleratedScene& scene, const GraspPose& grasp, const GripperModel& gripper,
                           ObjectId target_id) {
    auto fail = [](FailureReason r) { return GraspOutcome{false, r}; };
    const double aperture = gripper.max_aperture;
    const std::array<OrientedBox, 3> bodies{gripper.palm_box(grasp.gripper_pose),
                                            gripper.finger_box(grasp.gripper_pose, 1, aperture),
                                            gripper.finger_box(grasp.gripper_pose, -1, aperture)};

    // (a) Ground and other objects.
    if (scene.scene().has_ground_plane()) {
        for (const auto& box : bodies) {
            for (int i = 0; i < 8; ++i) {
                if (box.corner(i).z() < 0.0) return fail(FailureReason::ExternalCollision);
            }
        }
    }
    for (const auto& obj : scene.scene().objects()) {
        const ObjectId id = obj.mesh.object_id();
        if (id == target_id) continue;
        for (const auto& box : bodies) {
            if (box_intersects_solid(scene, box, id)) return fail(FailureReason::ExternalCollision);
        }
    }

    // (b) Object width between the open jaws at each pad depth.
    const Vec3 jaw = grasp.jaw_axis();
    for (const auto& pad : gripper.pad_points(1, aperture)) {
        const Vec3 center = grasp.gripper_pose.transform_point(Vec3(pad.x(), 0.0, 0.0));
        if (!scene.contains(center, target_id)) continue;
        const double width = exit_distance(scene, center, jaw, target_id) +
                             exit_distance(scene, center, -jaw, target_id);
        if (width > aperture) return fail(FailureReason::ApertureExceeded);
    }

    // (a, continued) Open-pose body penetration into the target.
    for (const auto& box : bodies) {
        if (box_penetrates(scene, box, target_id, gripper.penetration_tolerance)) {
            return fail(FailureReason::ExternalCollision);
        }
    }

    // (c) Closing sweep.
    const SweepResult sweep = closing_sweep(scene, grasp, gripper, target_id, aperture);
    const int touching = static_cast<int>(sweep.finger_contact(0, gripper.contact_min)) +
                         static_cast<int>(sweep.finger_contact(1, gripper.contact_min));
    if (touching == 2) return GraspOutcome{true, FailureReason::None};
    return fail(touching == 1 ? FailureReason::OneFingerContact : FailureReason::NoFingerContact);
}

LabelResult label_view(const AcceleratedScene& scene, const ViewSample& view, const GripperModel& gripper,
                       ObjectId target_id, int stride, const GraspConfig& config) {
    if (stride < 1) throw ValidationError("label_view: stride must be >= 1");
    if (!scene.scene().contains_object(target_id)) {
        throw ValidationError("label_view: scene has no object with id " + std::to_string(target_id));
    }
    gripper.validate();
    const int w = view.width(), h = view.height();
    LabelResult result;
    result.labels = GraspLabelMap(w, h, 1, std::int8_t{-1});
    result.reasons = Raster<std::uint8_t>(w, h, 1, kNotAttempted);

    std::vector<std::pair<int, int>> sampled;
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            if (view.segmentation.at(v, u) != target_id) continue;
            if (result.object_pixels % static_cast<std::size_t>(stride) == 0) sampled.emplace_back(u, v);
            ++result.object_pixels;
        }
    }
    result.sampled_pixels = sampled.size();

    std::vector<GraspOutcome> outcomes(sampled.size());
    parallel_for(sampled.size(), [&](std::size_t i) {
        const auto [u, v] = sampled[i];
        const GraspPose g = plan_grasp_pose(PixelCoord{double(u), double(v)}, view, gripper, config, target_id);
        outcomes[i] = attempt_grasp(scene, g, gripper, target_id);
    });
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        const auto [u, v] = sampled[i];
        result.labels.at(v, u) = outcomes[i].success ? 1 : 0;
        result.reasons.at(v, u) = static_cast<std::uint8_t>(outcomes[i].failure_reason);
        if (outcomes[i].success) ++result.positive_pixels;
    }
    return result;
}

}  // namespace pixgrasp

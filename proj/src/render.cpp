#include "pixgrasp/render.hpp"

#include "pixgrasp/parallel.hpp"

#include <cmath>
#include <string>

namespace pixgrasp {

void ViewSample::validate() const {
    intrinsics.validate();
    const int w = intrinsics.width, h = intrinsics.height;
    if (!rgb.same_shape(w, h) || rgb.channels() != 3 || !depth.same_shape(w, h) || depth.channels() != 1 ||
        !segmentation.same_shape(w, h) || segmentation.channels() != 1 || !normals.same_shape(w, h) ||
        normals.channels() != 3) {
        throw ValidationError("view: channel shapes do not match the intrinsics");
    }
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const float d = depth.at(v, u);
            const bool has_depth = d > 0.0f;
            const bool has_seg = segmentation.at(v, u) != 0;
            const Vec3 n(normals.at(v, u, 0), normals.at(v, u, 1), normals.at(v, u, 2));
            const bool has_normal = n.squaredNorm() > 0.0;
            const std::string where = " at (" + std::to_string(u) + ", " + std::to_string(v) + ")";
            if (!std::isfinite(d) || d < 0.0f) throw ValidationError("view: invalid depth value" + where);
            if (has_depth != has_seg || has_depth != has_normal) {
                throw ValidationError("view: depth/segmentation/normal support mismatch" + where);
            }
            if (has_normal) {
                if (std::abs(n.norm() - 1.0) > 1e-6) throw ValidationError("view: normal is not unit length" + where);
                if (!(n.z() < 0.0)) throw ValidationError("view: normal does not face the camera" + where);
            }
        }
    }
}

Vec3 object_albedo(ObjectId id) {
    if (id == kGroundObjectId) return {0.5, 0.5, 0.5};
    // Golden-angle hue walk keeps neighbouring ids visually distinct.
    const double hue = std::fmod(0.6 + 0.618033988749895 * id, 1.0);
    const double r = 0.55 + 0.35 * std::cos(2.0 * M_PI * hue);
    const double g = 0.55 + 0.35 * std::cos(2.0 * M_PI * (hue - 1.0 / 3.0));
    const double b = 0.55 + 0.35 * std::cos(2.0 * M_PI * (hue - 2.0 / 3.0));
    return {r, g, b};
}

Vec3 pixel_ray_direction(double u, double v, const Intrinsics& intr) {
    return Vec3((u - intr.u0) / intr.fx, (v - intr.v0) / intr.fy, 1.0).normalized();
}

ViewSample render_view(const AcceleratedScene& scene, const Pose& camera_pose, const Intrinsics& intr) {
    intr.validate();
    const int w = intr.width, h = intr.height;
    ViewSample view;
    view.rgb = Raster<float>(w, h, 3);
    view.depth = Raster<float>(w, h, 1);
    view.segmentation = Raster<std::uint16_t>(w, h, 1);
    view.normals = Raster<float>(w, h, 3);
    view.camera_pose = camera_pose;
    view.intrinsics = intr;

    const Mat3 rot = camera_pose.rotation();
    const Mat3 rot_t = rot.transpose();
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
        const int v = static_cast<int>(row);
        for (int u = 0; u < w; ++u) {
            const Vec3 dir_cam = pixel_ray_direction(u, v, intr);
            const Ray ray{camera_pose.position, rot * dir_cam};
            const auto hit = scene.raycast(ray);
            if (!hit) continue;
            const float depth = static_cast<float>(hit->t * dir_cam.z());
            if (!(depth > 0.0f)) continue;
            const Vec3 n_cam = rot_t * hit->face_normal;
            // Surfaces seen edge-on or from behind the image plane's normal are
            // left as background so every stored normal faces the camera.
            if (!(static_cast<float>(n_cam.z()) < 0.0f)) continue;
            view.depth.at(v, u) = depth;
            view.segmentation.at(v, u) = static_cast<std::uint16_t>(hit->object_id);
            const double shade = std::max(0.0, -n_cam.dot(dir_cam));
            const Vec3 albedo = object_albedo(hit->object_id);
            for (int c = 0; c < 3; ++c) {
                view.normals.at(v, u, c) = static_cast<float>(n_cam[c]);
                view.rgb.at(v, u, c) = static_cast<float>(albedo[c] * shade);
            }
        }
    });
    return view;
}

}  // namespace pixgrasp

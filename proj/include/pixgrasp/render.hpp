#pragma once

#include "pixgrasp/accel.hpp"
#include "pixgrasp/camera.hpp"
#include "pixgrasp/raster.hpp"

#include <cstdint>

namespace pixgrasp {

/// One RGB-D view with ground-truth channels.
///
/// depth is planar depth in meters (0 = no surface), segmentation holds object
/// ids (0 = background, 65535 = ground plane), normals are unit camera-frame
/// vectors facing the camera (zero = invalid). Channels are stored as float32,
/// which is also the on-disk precision.
struct ViewSample {
    Raster<float> rgb;                    // H x W x 3, [0, 1]
    Raster<float> depth;                  // H x W
    Raster<std::uint16_t> segmentation;   // H x W
    Raster<float> normals;                // H x W x 3
    Pose camera_pose;                     // camera -> world
    Intrinsics intrinsics;

    int width() const { return intrinsics.width; }
    int height() const { return intrinsics.height; }

    /// Shapes agree and depth > 0 <=> segmentation != 0 <=> normal != 0, with
    /// every non-zero normal unit length (1e-6) and camera facing (n_z < 0).
    /// Throws ValidationError describing the first violation.
    void validate() const;
};

/// Deterministic Lambertian albedo for an object id.
Vec3 object_albedo(ObjectId id);

/// One primary ray per pixel center. Rows are rendered in parallel.
ViewSample render_view(const AcceleratedScene& scene, const Pose& camera_pose, const Intrinsics& intr);

/// Camera-frame unit ray direction through pixel (u, v).
Vec3 pixel_ray_direction(double u, double v, const Intrinsics& intr);

}  // namespace pixgrasp

#pragma once

#include "pixgrasp/geometry.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pixgrasp {

/// Pinhole intrinsics. Pixel (u, v) has its center at integer coordinates:
/// u is the column, v the row, (0, 0) is the top-left pixel.
struct Intrinsics {
    double fx = 554.26;
    double fy = 554.26;
    double u0 = 320.0;
    double v0 = 240.0;
    int width = 640;
    int height = 480;

    /// Throws ValidationError when fx, fy <= 0 or the principal point is outside the image.
    void validate() const;

    /// Same field of view on both axes, resampled to width x height.
    Intrinsics rescaled(int new_width, int new_height) const;

    bool operator==(const Intrinsics&) const = default;
};

struct PixelCoord {
    double u = 0.0;
    double v = 0.0;
};

/// Camera-frame point for a pixel at planar depth z (distance along the optical axis):
/// ((u - u0) z / fx, (v - v0) z / fy, z). Throws InvalidDepthError for z <= 0.
Vec3 back_project(const PixelCoord& p, double z, const Intrinsics& intr);

struct Projection {
    PixelCoord pixel;
    double depth;
};

/// Inverse of back_project. Throws ValidationError for points at or behind the camera plane.
Projection project(const Vec3& p_cam, const Intrinsics& intr);

struct CameraGridSpec {
    int x_count = 100;
    int z_count = 10;
    std::pair<double, double> x_range{-0.5, 0.5};
    std::pair<double, double> z_range{-0.5, 0.5};
    double y_fixed = 0.5;
    std::pair<double, double> jitter_xy{-0.03, 0.03};
    std::pair<double, double> jitter_z{0.0, 0.09};
    std::uint64_t seed = 42;

    void validate() const;
    std::size_t size() const { return static_cast<std::size_t>(x_count) * z_count; }
};

/// One sampled view of the grid.
struct GridView {
    Pose pose;          // camera -> world
    Vec3 eye;
    Vec3 look_target;   // target + jitter
    Vec3 jitter;
    int x_index;
    int z_index;
};

/// Name of the generator and sampling scheme used for jitter; recorded in
/// dataset manifests so the draws can be reproduced elsewhere.
inline constexpr const char* kGridPrngName = "mt19937_64/uniform53";

/// Regular grid of cameras at y = y_fixed, each looking at `target` plus a
/// per-view uniform jitter (world axes). Ordered row-major over
/// (z_index, x_index); positions do not depend on the seed.
std::vector<GridView> sample_camera_grid(const CameraGridSpec& spec, const Vec3& target);

}  // namespace pixgrasp

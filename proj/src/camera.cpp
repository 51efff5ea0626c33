#include "pixgrasp/camera.hpp"

#include "pixgrasp/errors.hpp"

#include <cmath>
#include <random>

namespace pixgrasp {

void Intrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw ValidationError("intrinsics: focal lengths must be positive");
    if (width <= 0 || height <= 0) throw ValidationError("intrinsics: image size must be positive");
    if (!(u0 >= 0.0 && u0 < width) || !(v0 >= 0.0 && v0 < height)) {
        throw ValidationError("intrinsics: principal point outside the image");
    }
}

Intrinsics Intrinsics::rescaled(int new_width, int new_height) const {
    if (new_width <= 0 || new_height <= 0) throw ValidationError("intrinsics: image size must be positive");
    const double sx = static_cast<double>(new_width) / width;
    const double sy = static_cast<double>(new_height) / height;
    Intrinsics out{fx * sx, fy * sy, u0 * sx, v0 * sy, new_width, new_height};
    out.validate();
    return out;
}

Vec3 back_project(const PixelCoord& p, double z, const Intrinsics& intr) {
    if (!(z > 0.0) || !std::isfinite(z)) throw InvalidDepthError("back_project: depth must be positive");
    return {(p.u - intr.u0) * z / intr.fx, (p.v - intr.v0) * z / intr.fy, z};
}

Projection project(const Vec3& p_cam, const Intrinsics& intr) {
    if (!(p_cam.z() > 0.0)) throw ValidationError("project: point at or behind the camera plane");
    const double z = p_cam.z();
    return {{intr.u0 + intr.fx * p_cam.x() / z, intr.v0 + intr.fy * p_cam.y() / z}, z};
}

void CameraGridSpec::validate() const {
    if (x_count < 1 || z_count < 1) throw ValidationError("camera grid: counts must be >= 1");
    auto ordered = [](const std::pair<double, double>& r) { return r.first <= r.second; };
    if (!ordered(x_range) || !ordered(z_range) || !ordered(jitter_xy) || !ordered(jitter_z)) {
        throw ValidationError("camera grid: ranges must be ordered [min, max]");
    }
}

namespace {

double lerp_index(const std::pair<double, double>& range, int i, int count) {
    if (count == 1) return 0.5 * (range.first + range.second);
    return range.first + (range.second - range.first) * static_cast<double>(i) / (count - 1);
}

/// 53-bit uniform in [0, 1) from one 64-bit draw; portable unlike
/// std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, const std::pair<double, double>& r) {
    return r.first + (r.second - r.first) * uniform01(rng);
}

}  // namespace

std::vector<GridView> sample_camera_grid(const CameraGridSpec& spec, const Vec3& target) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::vector<GridView> views;
    views.reserve(spec.size());
    for (int iz = 0; iz < spec.z_count; ++iz) {
        for (int ix = 0; ix < spec.x_count; ++ix) {
            GridView view;
            view.x_index = ix;
            view.z_index = iz;
            view.eye = Vec3(lerp_index(spec.x_range, ix, spec.x_count), spec.y_fixed,
                            lerp_index(spec.z_range, iz, spec.z_count));
            const double dx = uniform(rng, spec.jitter_xy);
            const double dy = uniform(rng, spec.jitter_xy);
            const double dz = uniform(rng, spec.jitter_z);
            view.jitter = Vec3(dx, dy, dz);
            view.look_target = target + view.jitter;
            view.pose = look_at(view.eye, view.look_target);
            views.push_back(view);
        }
    }
    return views;
}

}  // namespace pixgrasp

#pragma once

#include "pixgrasp/camera.hpp"
#include "pixgrasp/raster.hpp"

namespace pixgrasp {

/// Recorded in output metadata so consumers know which formulation produced a map.
inline constexpr const char* kD2ntVariant = "d2nt-basic/central-difference";

/// Depth-to-normal translation.
///
/// With central-difference gradients g_u = dz/du and g_v = dz/dv, the normal is
///   n ~ (fx g_u, fy g_v, -(z + (u - u0) g_u + (v - v0) g_v))
/// normalized and oriented toward the camera (n_z < 0). Pixels whose
/// 4-neighbour stencil leaves the image or touches depth <= 0 get the zero
/// vector, as do pixels where the result is not camera facing.
///
/// Input is H x W planar depth (0 = invalid); output is H x W x 3.
/// Throws ValidationError when the depth map does not match the intrinsics.
Raster<float> depth_to_normals(const Raster<float>& depth, const Intrinsics& intr);

}  // namespace pixgrasp

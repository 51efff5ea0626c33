#include "pixgrasp/d2nt.hpp"

#include "pixgrasp/parallel.hpp"

#include <cmath>

namespace pixgrasp {

Raster<float> depth_to_normals(const Raster<float>& depth, const Intrinsics& intr) {
    intr.validate();
    if (!depth.same_shape(intr.width, intr.height) || depth.channels() != 1) {
        throw ValidationError("d2nt: depth map is " + std::to_string(depth.width()) + "x" +
                              std::to_string(depth.height()) + " but intrinsics expect " +
                              std::to_string(intr.width) + "x" + std::to_string(intr.height));
    }
    const int w = depth.width(), h = depth.height();
    Raster<float> normals(w, h, 3);
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
        const int v = static_cast<int>(row);
        if (v == 0 || v == h - 1) return;
        for (int u = 1; u + 1 < w; ++u) {
            const double z = depth.at(v, u);
            const double zl = depth.at(v, u - 1), zr = depth.at(v, u + 1);
            const double zt = depth.at(v - 1, u), zb = depth.at(v + 1, u);
            if (!(z > 0.0 && zl > 0.0 && zr > 0.0 && zt > 0.0 && zb > 0.0)) continue;
            const double gu = 0.5 * (zr - zl);
            const double gv = 0.5 * (zb - zt);
            Vec3 n(intr.fx * gu, intr.fy * gv, -(z + (u - intr.u0) * gu + (v - intr.v0) * gv));
            const double len = n.norm();
            if (!(len > 0.0) || !std::isfinite(len)) continue;
            n /= len;
            if (n.z() > 0.0) n = -n;
            if (!(static_cast<float>(n.z()) < 0.0f)) continue;
            for (int c = 0; c < 3; ++c) normals.at(v, u, c) = static_cast<float>(n[c]);
        }
    });
    return normals;
}

}  // namespace pixgrasp

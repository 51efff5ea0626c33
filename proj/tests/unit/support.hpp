#pragma once

#include "pixgrasp/accel.hpp"
#include "pixgrasp/geometry.hpp"
#include "pixgrasp/scene_config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

namespace testsupport {

using namespace pixgrasp;

inline double angle_deg(const Vec3& a, const Vec3& b) {
    const double c = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        const auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0; attempt < 100; ++attempt) {
            path_ = base / ("pixgrasp_test_" + std::to_string(rd()));
            if (std::filesystem::create_directory(path_)) return;
        }
        throw std::runtime_error("cannot create a temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Exact inside test for the tessellated upright cylinder of the canonical scene
/// (regular polygon prism), written against the vertex layout rather than the BVH.
struct PrismOracle {
    double radius;
    double height;
    int tessellation;
    Vec3 center;

    bool inside(const Vec3& p_world) const {
        const Vec3 p = p_world - center;
        if (std::abs(p.z()) > 0.5 * height) return false;
        for (int j = 0; j < tessellation; ++j) {
            const double a0 = 2.0 * std::numbers::pi * j / tessellation;
            const double a1 = 2.0 * std::numbers::pi * (j + 1) / tessellation;
            const double x0 = radius * std::cos(a0), y0 = radius * std::sin(a0);
            const double x1 = radius * std::cos(a1), y1 = radius * std::sin(a1);
            const double cross = (x1 - x0) * (p.y() - y0) - (y1 - y0) * (p.x() - x0);
            if (cross < 0.0) return false;
        }
        return true;
    }
};

}  // namespace testsupport

#include "pixgrasp/serialization.hpp"

#include "pixgrasp/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace pixgrasp {

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T get_required(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("field '") + key + "': " + e.what());
    }
}

std::pair<double, double> range_or(const Json& j, const char* key, std::pair<double, double> fallback) {
    if (!j.contains(key)) return fallback;
    const auto v = get_required<std::vector<double>>(j, key);
    if (v.size() != 2) throw ValidationError(std::string("field '") + key + "' must be [min, max]");
    return {v[0], v[1]};
}

}  // namespace

double round9(double x) {
    if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return std::strtod(buf, nullptr);
}

Json vec3_to_json(const Vec3& v) { return Json::array({round9(v.x()), round9(v.y()), round9(v.z())}); }

Vec3 vec3_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw ValidationError("expected a 3-element array");
    try {
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("bad vector: ") + e.what());
    }
}

Json pose_to_json(const Pose& p) {
    const Quat q = canonical(p.orientation);
    return Json{{"position", vec3_to_json(p.position)},
                {"orientation", {{"w", round9(q.w())}, {"x", round9(q.x())}, {"y", round9(q.y())}, {"z", round9(q.z())}}}};
}

Pose pose_from_json(const Json& j) {
    Pose p;
    if (j.contains("position")) p.position = vec3_from_json(j.at("position"));
    if (j.contains("orientation")) {
        const Json& o = j.at("orientation");
        Quat q;
        if (o.is_array()) {
            if (o.size() != 4) throw ValidationError("orientation must be [w, x, y, z]");
            q = Quat(o[0].get<double>(), o[1].get<double>(), o[2].get<double>(), o[3].get<double>());
        } else {
            q = Quat(get_required<double>(o, "w"), get_required<double>(o, "x"), get_required<double>(o, "y"),
                     get_required<double>(o, "z"));
        }
        if (!(q.norm() > 0.0)) throw ValidationError("orientation quaternion is zero");
        p.orientation = q.normalized();
    }
    return p;
}

Json intrinsics_to_json(const Intrinsics& intr) {
    return Json{{"fx", round9(intr.fx)}, {"fy", round9(intr.fy)},       {"u0", round9(intr.u0)},
                {"v0", round9(intr.v0)}, {"width", intr.width}, {"height", intr.height}};
}

Intrinsics intrinsics_from_json(const Json& j) {
    Intrinsics intr{get_required<double>(j, "fx"), get_required<double>(j, "fy"), get_required<double>(j, "u0"),
                    get_required<double>(j, "v0"), get_required<int>(j, "width"),  get_required<int>(j, "height")};
    intr.validate();
    return intr;
}

Json gripper_to_json(const GripperModel& g) {
    return Json{{"max_aperture", round9(g.max_aperture)},
                {"finger_length", round9(g.finger_length)},
                {"finger_thickness", round9(g.finger_thickness)},
                {"finger_width", round9(g.finger_width)},
                {"palm_depth", round9(g.palm_depth)},
                {"palm_width", round9(g.palm_width)},
                {"palm_height", round9(g.palm_height)},
                {"finger_reach", round9(g.finger_reach)},
                {"pad_points_per_finger", g.pad_points_per_finger},
                {"contact_min", g.contact_min},
                {"penetration_tolerance", round9(g.penetration_tolerance)}};
}

GripperModel gripper_from_json(const Json& j, GripperModel g) {
    g.max_aperture = get_or(j, "max_aperture", g.max_aperture);
    g.finger_length = get_or(j, "finger_length", g.finger_length);
    g.finger_thickness = get_or(j, "finger_thickness", g.finger_thickness);
    g.finger_width = get_or(j, "finger_width", g.finger_width);
    g.palm_depth = get_or(j, "palm_depth", g.palm_depth);
    g.palm_width = get_or(j, "palm_width", g.palm_width);
    g.palm_height = get_or(j, "palm_height", g.palm_height);
    g.finger_reach = get_or(j, "finger_reach", g.finger_reach);
    g.pad_points_per_finger = get_or(j, "pad_points_per_finger", g.pad_points_per_finger);
    g.contact_min = get_or(j, "contact_min", g.contact_min);
    g.penetration_tolerance = get_or(j, "penetration_tolerance", g.penetration_tolerance);
    g.validate();
    return g;
}

Json grid_to_json(const CameraGridSpec& g) {
    auto range = [](const std::pair<double, double>& r) { return Json::array({round9(r.first), round9(r.second)}); };
    return Json{{"x_count", g.x_count},         {"z_count", g.z_count},     {"x_range", range(g.x_range)},
                {"z_range", range(g.z_range)},   {"y_fixed", round9(g.y_fixed)}, {"jitter_xy", range(g.jitter_xy)},
                {"jitter_z", range(g.jitter_z)}, {"seed", g.seed},           {"prng", kGridPrngName}};
}

CameraGridSpec grid_from_json(const Json& j, CameraGridSpec g) {
    g.x_count = get_or(j, "x_count", g.x_count);
    g.z_count = get_or(j, "z_count", g.z_count);
    g.x_range = range_or(j, "x_range", g.x_range);
    g.z_range = range_or(j, "z_range", g.z_range);
    g.y_fixed = get_or(j, "y_fixed", g.y_fixed);
    g.jitter_xy = range_or(j, "jitter_xy", g.jitter_xy);
    g.jitter_z = range_or(j, "jitter_z", g.jitter_z);
    g.seed = get_or(j, "seed", g.seed);
    g.validate();
    return g;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("writing " + path.string() + " failed");
}

}  // namespace pixgrasp

#pragma once

#include "pixgrasp/camera.hpp"
#include "pixgrasp/geometry.hpp"
#include "pixgrasp/grasp_sim.hpp"

#include <json.hpp>

#include <filesystem>

namespace pixgrasp {

using Json = nlohmann::json;

/// Rounds to 9 significant digits so serialized floats are short and stable.
double round9(double x);

Json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const Json& j);

Json pose_to_json(const Pose& p);
Pose pose_from_json(const Json& j);

Json intrinsics_to_json(const Intrinsics& intr);
Intrinsics intrinsics_from_json(const Json& j);

Json gripper_to_json(const GripperModel& g);
/// Missing keys keep their defaults.
GripperModel gripper_from_json(const Json& j, GripperModel base = {});

Json grid_to_json(const CameraGridSpec& g);
CameraGridSpec grid_from_json(const Json& j, CameraGridSpec base = {});

Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed, sorted keys, trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace pixgrasp

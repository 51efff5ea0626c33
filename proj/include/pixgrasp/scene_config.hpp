#pragma once

#include "pixgrasp/accel.hpp"
#include "pixgrasp/camera.hpp"
#include "pixgrasp/grasp_sim.hpp"
#include "pixgrasp/serialization.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pixgrasp {

struct ObjectSpec {
    ObjectId id = 1;
    std::string kind;                 // primitive name; empty when obj_path is set
    std::filesystem::path obj_path;   // absolute after loading
    std::vector<double> dimensions;
    int tessellation = 64;
    Pose pose;
};

/// Everything needed to generate a dataset: scene.json.
///
///   {
///     "objects": [{"id": 1, "kind": "cylinder", "dimensions": [0.04, 0.3],
///                  "tessellation": 64,
///                  "pose": {"position": [0, 0, 0.15], "orientation": [1, 0, 0, 0]}}],
///     "ground_plane": true,
///     "target_id": 1,
///     "gripper": {...}, "grasp": {...},
///     "grid": {..., "target": [0, 0, 0.15]},
///     "intrinsics": {...},
///     "stride": 1
///   }
///
/// Only "objects" is required. Objects may use "obj_path" (relative to the
/// config file) instead of "kind"; orientation is [w, x, y, z].
struct SceneConfig {
    std::vector<ObjectSpec> objects;
    bool ground_plane = true;
    ObjectId target_id = 1;
    GripperModel gripper;
    GraspConfig grasp;
    CameraGridSpec grid;
    Vec3 grid_target = Vec3::Zero();
    Intrinsics intrinsics;
    int stride = 1;
    double depth_normalization_scale = 2.0;

    const ObjectSpec& target() const;
};

/// `base_dir` resolves relative obj_path entries.
SceneConfig scene_config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
SceneConfig load_scene_config(const std::filesystem::path& path);
Json scene_config_to_json(const SceneConfig& config);

/// Meshes are generated or loaded and posed; throws on bad objects.
Scene build_scene(const SceneConfig& config);

/// The r = 0.04 m, h = 0.30 m upright cylinder standing on the ground at the
/// origin, with default gripper and intrinsics. The grid looks at the
/// cylinder's center and only spans camera heights above the ground.
SceneConfig canonical_cylinder_config(int tessellation = 64);

}  // namespace pixgrasp

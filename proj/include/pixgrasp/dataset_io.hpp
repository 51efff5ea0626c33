#pragma once

#include "pixgrasp/camera.hpp"
#include "pixgrasp/grasp_sim.hpp"
#include "pixgrasp/render.hpp"
#include "pixgrasp/serialization.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pixgrasp {

inline constexpr int kFormatVersion = 1;

// File names inside a view directory.
inline constexpr const char* kRgbFile = "rgb.png";
inline constexpr const char* kDepthFile = "depth.pfm";
inline constexpr const char* kSegmentationFile = "segmentation.png";
inline constexpr const char* kNormalsFile = "normals.pfm";
inline constexpr const char* kLabelsFile = "labels.png";
inline constexpr const char* kViewMetaFile = "view.json";
inline constexpr const char* kManifestFile = "manifest.json";

/// Label PNG bytes: 1 -> 255, 0 -> 0, -1 -> 128.
std::uint8_t label_to_byte(std::int8_t label);
/// Throws ValidationError for bytes outside {0, 128, 255}.
std::int8_t byte_to_label(std::uint8_t byte);

/// "view_0007"
std::string view_dir_name(std::size_t index);

struct StoredView {
    ViewSample view;
    std::optional<GraspLabelMap> labels;
    std::optional<ObjectId> target_id;
};

/// Writes rgb/depth/segmentation/normals (and labels when given) plus
/// view.json with the camera pose and intrinsics. Creates `dir`.
void write_view(const std::filesystem::path& dir, const ViewSample& view, const GraspLabelMap* labels = nullptr,
                std::optional<ObjectId> target_id = std::nullopt);

/// Inverse of write_view. The view is re-validated; labels must match the view
/// size and may only be non-negative on target pixels (or, without a recorded
/// target, on non-background pixels). Missing files raise IoError, malformed
/// content raises ValidationError.
StoredView read_view(const std::filesystem::path& dir);

struct ManifestView {
    std::size_t index = 0;
    std::size_t grid_index = 0;
    int x_index = 0;
    int z_index = 0;
    Pose camera_pose;
    Vec3 jitter = Vec3::Zero();
    std::string dir;  // relative to the dataset root
    std::size_t object_pixels = 0;
    std::size_t sampled_pixels = 0;
    std::size_t positive_pixels = 0;
};

struct DatasetManifest {
    int format_version = kFormatVersion;
    Intrinsics intrinsics;
    CameraGridSpec grid;
    Vec3 grid_target = Vec3::Zero();
    GripperModel gripper;
    GraspConfig grasp;
    int stride = 1;
    ObjectId target_id = 1;
    double depth_normalization_scale = 2.0;
    Json scene;  // the scene section of the generating config
    std::vector<ManifestView> views;
};

Json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const Json& j);

void write_manifest(const std::filesystem::path& root, const DatasetManifest& m);
/// Checks the format version and that every referenced file exists.
DatasetManifest read_manifest(const std::filesystem::path& root);

}  // namespace pixgrasp

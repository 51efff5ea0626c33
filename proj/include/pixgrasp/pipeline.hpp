#pragma once

#include "pixgrasp/dataset_io.hpp"
#include "pixgrasp/grasp_sim.hpp"
#include "pixgrasp/predict.hpp"
#include "pixgrasp/serialization.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pixgrasp {

inline constexpr double kMaxTorque = 3.0;  // N m, carried as metadata

struct PipelineConfig {
    Predictor predictor;
    double threshold = kDefaultThreshold;
    GripperModel gripper;
    GraspConfig grasp;
    double depth_normalization_scale = 2.0;  // m
    std::optional<std::filesystem::path> mask_path;  // replaces the segmentation mask
    ObjectId target_id = 1;

    void validate() const;
};

struct GraspCommand {
    Vec3 position = Vec3::Zero();  // world, on the surface
    Quat orientation = Quat::Identity();
    double aperture = 0.0;
    double surface_offset = 0.0;
    double staging_distance = 0.0;
    double max_torque = kMaxTorque;
    PixelCoord pixel;
    double q_value = 0.0;
};

Json grasp_command_to_json(const GraspCommand& cmd);

struct EulerZyx {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
};

/// Z-Y-X angles of the tool frame whose +X is -normal and whose +Y follows
/// the jaw rule of jaw_axis_for.
EulerZyx grasp_euler_from_normal(const Vec3& normal, const Vec3& fallback_right = Vec3::UnitX());

/// Tool orientation for a world-frame surface normal, built through the
/// Euler angles above. Throws ValidationError for a zero or non-finite normal.
Quat grasp_orientation_from_normal(const Vec3& normal, const Vec3& fallback_right = Vec3::UnitX());

/// Same rotation assembled directly from the axes.
Quat grasp_orientation_direct(const Vec3& normal, const Vec3& fallback_right = Vec3::UnitX());

/// Network input layout: RGB (3), depth / scale clamped to [0, 1] (1),
/// unit normals (3), mask (1).
Raster<float> preprocess(const ViewSample& view, const Raster<float>& normals, const Mask& mask,
                         double depth_scale);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct PipelineResult {
    GraspCommand command;
    Vec3 normal_world = Vec3::Zero();   // d2nt normal at the pixel
    Selection selection;
    QualityMap quality;
    Raster<float> d2nt_normals;
    Raster<float> network_input;  // 8 channels, see preprocess
    std::vector<StageTiming> timings;
};

/// Mask acquisition and d2nt run concurrently; then preprocess, predict,
/// select, back-project and orient. Quality is additionally zeroed where the
/// d2nt normal is invalid because the orientation comes from it.
PipelineResult run_pipeline(const ViewSample& view, const PipelineConfig& config,
                            const GraspLabelMap* labels = nullptr);

/// Loads view_NNNN/ and runs the pipeline. The target id recorded with the
/// view overrides config.target_id.
PipelineResult run_pipeline(const std::filesystem::path& view_dir, PipelineConfig config);

struct ViewEvaluation {
    std::size_t index = 0;
    std::string dir;
    EvalMetrics metrics;
    std::size_t labeled_pixels = 0;
    std::size_t positive_labels = 0;
    std::size_t predicted_positive = 0;
};

struct DatasetEvaluation {
    std::string predictor;
    double threshold = kDefaultThreshold;
    std::vector<ViewEvaluation> views;
    EvalMetrics pooled;                    // counts summed over all views
    double mean_precision = 0.0;           // over views with a predicted positive
    std::size_t precision_views = 0;
    double positive_base_rate = 0.0;       // positives / labeled pixels
};

Json dataset_evaluation_to_json(const DatasetEvaluation& e);

/// Scores a predictor on every view of a dataset with predict_quality and
/// evaluate. For heatmaps the predictor path is a directory holding
/// view_NNNN.pfm files named after the view directories.
DatasetEvaluation evaluate_dataset(const std::filesystem::path& root, const Predictor& predictor,
                                   double threshold = kDefaultThreshold);

}  // namespace pixgrasp

#pragma once

#include "pixgrasp/grasp_sim.hpp"
#include "pixgrasp/raster.hpp"
#include "pixgrasp/render.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pixgrasp {

/// Per-pixel grasp quality in [0, 1], zero outside the target mask.
using QualityMap = Raster<float>;
/// 1 = target pixel, 0 = anything else.
using Mask = Raster<std::uint8_t>;

inline constexpr double kDefaultThreshold = 0.85;
inline constexpr double kHeuristicEdgeReference = 10.0;  // pixels

enum class PredictorKind { Heuristic, Oracle, Heatmap };

struct Predictor {
    PredictorKind kind = PredictorKind::Heuristic;
    std::filesystem::path heatmap;  // Heatmap only

    /// "heuristic", "oracle" or "heatmap:PATH".
    static Predictor parse(const std::string& text);
    std::string name() const;
};

Mask mask_from_segmentation(const Raster<std::uint16_t>& segmentation, ObjectId target_id);
/// Any non-zero byte of a gray PNG is foreground. Must match the view size.
Mask load_mask(const std::filesystem::path& path, int width, int height);
std::size_t mask_count(const Mask& mask);

/// Euclidean distance (pixels) from each mask pixel to the nearest pixel
/// outside the mask; the area beyond the image border counts as outside.
/// Zero outside the mask.
Raster<float> distance_to_mask_boundary(const Mask& mask);

/// q = mask * clamp(-n_z, 0, 1) * min(1, d_mask / 10), with n the d2nt normal.
QualityMap heuristic_quality(const Mask& mask, const Raster<float>& d2nt_normals);
/// 1 where the label is 1, else 0.
QualityMap oracle_quality(const GraspLabelMap& labels, const Mask& mask);
/// 1-channel PFM of the view size; values are clamped to [0, 1] and zeroed outside the mask.
QualityMap heatmap_quality(const std::filesystem::path& path, const Mask& mask);

/// Dispatches on the predictor, then zeroes pixels without depth or normal in
/// the view. `d2nt_normals` is needed for the heuristic, `labels` for the oracle.
QualityMap predict_quality(const ViewSample& view, const Predictor& predictor, const Mask& mask,
                           const Raster<float>* d2nt_normals, const GraspLabelMap* labels);

struct Selection {
    int col = 0;
    int row = 0;
    float q_value = 0.0f;
    std::vector<std::pair<int, int>> region;  // (col, row) with q >= threshold, row-major
};

/// Argmax of q over the mask; ties go to the smallest row-major index.
/// Throws EmptyMaskError for an empty mask and NoViablePixelError when q is 0
/// on every mask pixel.
Selection select_grasp_pixel(const QualityMap& q, const Mask& mask, double threshold = kDefaultThreshold);

struct EvalMetrics {
    double precision = 1.0;
    double recall = 1.0;
    double iou = 1.0;
    double threshold = kDefaultThreshold;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    /// Recomputes the ratios from the counts. A ratio with an empty
    /// denominator is 1 (nothing was predicted or nothing was missed).
    void finalize();
    EvalMetrics& operator+=(const EvalMetrics& other);
    std::size_t total() const { return tp + fp + fn + tn; }
};

/// Binarizes q at `threshold` (q >= threshold is positive) and compares with
/// the labels over pixels labeled 0 or 1.
EvalMetrics evaluate(const QualityMap& q, const GraspLabelMap& labels, double threshold = kDefaultThreshold);

}  // namespace pixgrasp

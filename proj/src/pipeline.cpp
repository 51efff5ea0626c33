#include "pixgrasp/pipeline.hpp"

#include "pixgrasp/d2nt.hpp"
#include "pixgrasp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace pixgrasp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec3 checked_approach(const Vec3& normal) {
    const double n = normal.norm();
    if (!std::isfinite(n) || n < 1e-12) throw ValidationError("grasp orientation: zero or non-finite normal");
    return -normal / n;
}

}  // namespace

void PipelineConfig::validate() const {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ValidationError("threshold must be in (0, 1]");
    if (!(depth_normalization_scale > 0.0)) throw ValidationError("depth normalization scale must be > 0");
    gripper.validate();
}

Json grasp_command_to_json(const GraspCommand& cmd) {
    const Quat q = canonical(cmd.orientation);
    return Json{{"position", vec3_to_json(cmd.position)},
                {"orientation", {{"w", round9(q.w())}, {"x", round9(q.x())}, {"y", round9(q.y())}, {"z", round9(q.z())}}},
                {"aperture", round9(cmd.aperture)},
                {"surface_offset", round9(cmd.surface_offset)},
                {"staging_distance", round9(cmd.staging_distance)},
                {"max_torque", round9(cmd.max_torque)},
                {"pixel", {{"u", round9(cmd.pixel.u)}, {"v", round9(cmd.pixel.v)}}},
                {"q_value", round9(cmd.q_value)}};
}

EulerZyx grasp_euler_from_normal(const Vec3& normal, const Vec3& fallback_right) {
    const Vec3 a = checked_approach(normal);
    const Vec3 j = jaw_axis_for(a, fallback_right);
    EulerZyx e;
    e.yaw = std::atan2(a.y(), a.x());
    e.pitch = std::atan2(-a.z(), std::hypot(a.x(), a.y()));
    const Mat3 rzy = (Eigen::AngleAxisd(e.yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(e.pitch, Vec3::UnitY())).toRotationMatrix();
    e.roll = std::atan2(j.dot(rzy.col(2)), j.dot(rzy.col(1)));
    return e;
}

Quat grasp_orientation_from_normal(const Vec3& normal, const Vec3& fallback_right) {
    const EulerZyx e = grasp_euler_from_normal(normal, fallback_right);
    return canonical(quat_from_euler_zyx(e.yaw, e.pitch, e.roll));
}

Quat grasp_orientation_direct(const Vec3& normal, const Vec3& fallback_right) {
    const Vec3 a = checked_approach(normal);
    return canonical(Quat(grasp_rotation(a, jaw_axis_for(a, fallback_right))));
}

Raster<float> preprocess(const ViewSample& view, const Raster<float>& normals, const Mask& mask, double depth_scale) {
    const int w = view.width(), h = view.height();
    if (!normals.same_shape(w, h) || !mask.same_shape(w, h)) throw ValidationError("preprocess: size mismatch");
    Raster<float> x(w, h, 8, 0.0f);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            for (int k = 0; k < 3; ++k) x.at(r, c, k) = std::clamp(view.rgb.at(r, c, k), 0.0f, 1.0f);
            x.at(r, c, 3) = static_cast<float>(std::clamp(view.depth.at(r, c) / depth_scale, 0.0, 1.0));
            const Vec3 n(normals.at(r, c, 0), normals.at(r, c, 1), normals.at(r, c, 2));
            const double len = n.norm();
            if (len > 0.0) {
                for (int k = 0; k < 3; ++k) x.at(r, c, 4 + k) = static_cast<float>(n[k] / len);
            }
            x.at(r, c, 7) = mask.at(r, c) ? 1.0f : 0.0f;
        }
    }
    return x;
}

PipelineResult run_pipeline(const ViewSample& view, const PipelineConfig& config, const GraspLabelMap* labels) {
    config.validate();
    PipelineResult out;
    const int w = view.width(), h = view.height();

    auto t0 = Clock::now();
    auto mask_job = std::async(std::launch::async, [&] {
        const auto start = Clock::now();
        Mask m = config.mask_path ? load_mask(*config.mask_path, w, h)
                                  : mask_from_segmentation(view.segmentation, config.target_id);
        return std::pair{std::move(m), seconds_since(start)};
    });
    const auto normals_start = Clock::now();
    out.d2nt_normals = depth_to_normals(view.depth, view.intrinsics);
    const double normals_seconds = seconds_since(normals_start);
    auto [mask, mask_seconds] = mask_job.get();
    out.timings.push_back({"mask", mask_seconds});
    out.timings.push_back({"normals", normals_seconds});
    out.timings.push_back({"mask_and_normals", seconds_since(t0)});
    if (mask_count(mask) == 0) throw EmptyMaskError("target mask is empty");

    t0 = Clock::now();
    out.network_input = preprocess(view, out.d2nt_normals, mask, config.depth_normalization_scale);
    out.timings.push_back({"preprocess", seconds_since(t0)});

    t0 = Clock::now();
    out.quality = predict_quality(view, config.predictor, mask, &out.d2nt_normals, labels);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (out.d2nt_normals.at(r, c, 2) == 0.0f) out.quality.at(r, c) = 0.0f;
        }
    }
    out.timings.push_back({"predict", seconds_since(t0)});

    t0 = Clock::now();
    out.selection = select_grasp_pixel(out.quality, mask, config.threshold);
    out.timings.push_back({"select", seconds_since(t0)});

    t0 = Clock::now();
    const int row = out.selection.row, col = out.selection.col;
    const double z = view.depth.at(row, col);
    const Vec3 n_cam(out.d2nt_normals.at(row, col, 0), out.d2nt_normals.at(row, col, 1),
                     out.d2nt_normals.at(row, col, 2));
    if (!(z > 0.0) || n_cam.isZero()) {
        throw InvalidDepthError("selected pixel has no valid depth or normal");
    }
    const PixelCoord pixel{double(col), double(row)};
    GraspCommand& cmd = out.command;
    cmd.position = view.camera_pose.transform_point(back_project(pixel, z, view.intrinsics));
    out.normal_world = view.camera_pose.rotate(n_cam).normalized();
    out.timings.push_back({"back_project", seconds_since(t0)});

    t0 = Clock::now();
    const Vec3 camera_right = view.camera_pose.rotate(Vec3::UnitX());
    cmd.orientation = grasp_orientation_from_normal(out.normal_world, camera_right);
    out.timings.push_back({"orientation", seconds_since(t0)});

    cmd.aperture = config.gripper.max_aperture;
    cmd.surface_offset = config.grasp.surface_offset;
    cmd.staging_distance = config.grasp.staging_distance;
    cmd.max_torque = kMaxTorque;
    cmd.pixel = pixel;
    cmd.q_value = out.selection.q_value;
    return out;
}

PipelineResult run_pipeline(const std::filesystem::path& view_dir, PipelineConfig config) {
    const StoredView stored = read_view(view_dir);
    if (stored.target_id) config.target_id = *stored.target_id;
    const GraspLabelMap* labels = stored.labels ? &*stored.labels : nullptr;
    if (config.predictor.kind == PredictorKind::Oracle && !labels) {
        throw ValidationError(view_dir.string() + ": oracle predictor needs labels.png");
    }
    return run_pipeline(stored.view, config, labels);
}

Json dataset_evaluation_to_json(const DatasetEvaluation& e) {
    auto metrics_json = [](const EvalMetrics& m) {
        return Json{{"precision", round9(m.precision)}, {"recall", round9(m.recall)}, {"iou", round9(m.iou)},
                    {"threshold", round9(m.threshold)}, {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}};
    };
    Json views = Json::array();
    for (const ViewEvaluation& v : e.views) {
        views.push_back(Json{{"index", v.index},
                             {"dir", v.dir},
                             {"metrics", metrics_json(v.metrics)},
                             {"labeled_pixels", v.labeled_pixels},
                             {"positive_labels", v.positive_labels},
                             {"predicted_positive", v.predicted_positive}});
    }
    return Json{{"predictor", e.predictor},
                {"threshold", round9(e.threshold)},
                {"pooled", metrics_json(e.pooled)},
                {"mean_precision", round9(e.mean_precision)},
                {"precision_views", e.precision_views},
                {"positive_base_rate", round9(e.positive_base_rate)},
                {"view_count", e.views.size()},
                {"views", views}};
}

DatasetEvaluation evaluate_dataset(const std::filesystem::path& root, const Predictor& predictor, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ValidationError("threshold must be in (0, 1]");
    const DatasetManifest manifest = read_manifest(root);
    DatasetEvaluation out;
    out.predictor = predictor.name();
    out.threshold = threshold;
    out.pooled.threshold = threshold;
    double precision_sum = 0.0;
    for (const ManifestView& mv : manifest.views) {
        const StoredView stored = read_view(root / mv.dir);
        if (!stored.labels) throw ValidationError(mv.dir + ": labels.png is missing");
        const ObjectId target = stored.target_id.value_or(manifest.target_id);
        const Mask mask = mask_from_segmentation(stored.view.segmentation, target);

        Predictor p = predictor;
        if (p.kind == PredictorKind::Heatmap) p.heatmap = predictor.heatmap / (mv.dir + ".pfm");
        Raster<float> normals;
        if (p.kind == PredictorKind::Heuristic) normals = depth_to_normals(stored.view.depth, stored.view.intrinsics);
        const QualityMap q = predict_quality(stored.view, p, mask, &normals, &*stored.labels);

        ViewEvaluation ve;
        ve.index = mv.index;
        ve.dir = mv.dir;
        ve.metrics = evaluate(q, *stored.labels, threshold);
        ve.labeled_pixels = ve.metrics.total();
        ve.positive_labels = ve.metrics.tp + ve.metrics.fn;
        ve.predicted_positive = ve.metrics.tp + ve.metrics.fp;
        if (ve.predicted_positive > 0) {
            precision_sum += ve.metrics.precision;
            ++out.precision_views;
        }
        out.pooled += ve.metrics;
        out.views.push_back(std::move(ve));
    }
    out.pooled.finalize();
    out.mean_precision = out.precision_views ? precision_sum / double(out.precision_views) : 0.0;
    const std::size_t labeled = out.pooled.total();
    out.positive_base_rate = labeled ? double(out.pooled.tp + out.pooled.fn) / double(labeled) : 0.0;
    return out;
}

}  // namespace pixgrasp

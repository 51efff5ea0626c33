// Acceptance checks: one PASS/FAIL line per criterion.
//
//   pixgrasp_acceptance            run everything
//   pixgrasp_acceptance NAME...    run only the named criteria
//
// The exit status is non-zero when any selected criterion fails.

#include "pixgrasp/camera.hpp"
#include "pixgrasp/d2nt.hpp"
#include "pixgrasp/dataset.hpp"
#include "pixgrasp/dataset_io.hpp"
#include "pixgrasp/image_io.hpp"
#include "pixgrasp/pipeline.hpp"
#include "pixgrasp/render.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pixgrasp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects the first few failure notes of a criterion.
struct Checker {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (notes.size() < 5) notes.push_back(what);
    }
    Outcome outcome(const std::string& summary) const {
        std::string d = summary;
        for (const auto& n : notes) d += "; " + n;
        return {ok, d};
    }
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double angle_deg(const Vec3& a, const Vec3& b) {
    return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        path_ = fs::temp_directory_path() / ("pixgrasp_acceptance_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + PIXGRASP_CLI + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<Pose> canonical_poses(std::size_t count) {
    const SceneConfig c = canonical_cylinder_config();
    const auto grid = sample_camera_grid(c.grid, c.grid_target);
    std::vector<Pose> out;
    for (std::size_t i : select_grid_indices(grid.size(), count)) out.push_back(grid[i].pose);
    return out;
}

// Exact inside test for the tessellated canonical cylinder (convex prism).
struct Prism {
    double radius = 0.04, height = 0.30;
    int tessellation = 64;
    Vec3 center = Vec3(0, 0, 0.15);

    bool inside(const Vec3& p) const {
        const Vec3 q = p - center;
        if (std::abs(q.z()) > 0.5 * height) return false;
        for (int j = 0; j < tessellation; ++j) {
            const double a0 = 2.0 * std::numbers::pi * j / tessellation;
            const double a1 = 2.0 * std::numbers::pi * (j + 1) / tessellation;
            const Eigen::Vector2d v0(radius * std::cos(a0), radius * std::sin(a0));
            const Eigen::Vector2d v1(radius * std::cos(a1), radius * std::sin(a1));
            const Eigen::Vector2d e = v1 - v0;
            const double cross = e.x() * (q.y() - v0.y()) - e.y() * (q.x() - v0.x());
            if (cross < 0.0) return false;
        }
        return true;
    }
};

// --- criteria ---------------------------------------------------------------

Outcome back_projection() {
    const Intrinsics intr;
    Checker chk;
    chk.expect(intr.fx == 554.26 && intr.fy == 554.26 && intr.u0 == 320 && intr.v0 == 240, "default intrinsics");
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 640), v(0, 480), z(0.05, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const PixelCoord px{u(rng), v(rng)};
        const double depth = z(rng);
        const Projection p = project(back_project(px, depth, intr), intr);
        worst = std::max({worst, std::abs(p.pixel.u - px.u) / std::max(1.0, px.u),
                          std::abs(p.pixel.v - px.v) / std::max(1.0, px.v), std::abs(p.depth - depth) / depth});
    }
    chk.expect(worst <= 1e-9, "relative error " + fmt("%.3g", worst));
    return chk.outcome("1000 pairs, worst relative error " + fmt("%.3g", worst));
}

Outcome camera_grid() {
    Checker chk;
    const CameraGridSpec spec;
    chk.expect(spec.x_count == 100 && spec.z_count == 10 && spec.x_range == std::pair{-0.5, 0.5} &&
                   spec.z_range == std::pair{-0.5, 0.5} && spec.y_fixed == 0.5,
               "default grid spec");
    const auto a = sample_camera_grid(spec, Vec3::Zero());
    const auto b = sample_camera_grid(spec, Vec3::Zero());
    chk.expect(a.size() == 1000, "pose count " + std::to_string(a.size()));
    std::size_t out_of_range = 0, differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vec3& j = a[i].jitter;
        out_of_range += !(std::abs(j.x()) <= 0.03 && std::abs(j.y()) <= 0.03 && j.z() >= 0.0 && j.z() <= 0.09);
        differing += std::memcmp(a[i].pose.position.data(), b[i].pose.position.data(), sizeof(double) * 3) != 0 ||
                     std::memcmp(a[i].pose.orientation.coeffs().data(), b[i].pose.orientation.coeffs().data(),
                                 sizeof(double) * 4) != 0 ||
                     std::memcmp(j.data(), b[i].jitter.data(), sizeof(double) * 3) != 0;
    }
    chk.expect(out_of_range == 0, std::to_string(out_of_range) + " jitters out of range");
    chk.expect(differing == 0, std::to_string(differing) + " poses differ between runs");
    return chk.outcome(std::to_string(a.size()) + " poses, jitter in range, reruns byte-identical");
}

Outcome d2nt_accuracy() {
    Checker chk;
    const Intrinsics intr;  // 640x480

    // Tilted plane filling the view.
    const Quat tilt = canonical(quat_from_euler_zyx(0.4, 0.0, 0.5));
    const AcceleratedScene plane(
        Scene({{make_primitive(PrimitiveKind::Plane, {20, 20}, 3, 1), Pose{Vec3::Zero(), tilt}}}, false));
    const Pose cam = look_at(Vec3(0.3, -0.2, 1.5), Vec3::Zero());
    const ViewSample pv = render_view(plane, cam, intr);
    const Raster<float> pn = depth_to_normals(pv.depth, intr);
    const Vec3 plane_normal_cam = cam.rotation().transpose() * (tilt * Vec3::UnitZ());
    double plane_worst = 0.0;
    std::size_t plane_px = 0;
    for (int r = 1; r + 1 < intr.height; ++r) {
        for (int c = 1; c + 1 < intr.width; ++c) {
            const Vec3 e(pn.at(r, c, 0), pn.at(r, c, 1), pn.at(r, c, 2));
            if (e.isZero()) continue;
            const Vec3 truth = plane_normal_cam.z() < 0 ? plane_normal_cam : Vec3(-plane_normal_cam);
            plane_worst = std::max(plane_worst, angle_deg(e, truth));
            ++plane_px;
        }
    }
    chk.expect(plane_px == std::size_t(intr.width - 2) * (intr.height - 2), "plane interior not fully valid");
    chk.expect(plane_worst < 0.5, "plane worst " + fmt("%.4f", plane_worst));

    // Sphere, tess 256, radius 0.1 at 0.5 m; interior = valid d2nt pixels.
    const Vec3 center(0.0, 0.0, 0.5);
    const AcceleratedScene sphere(
        Scene({{make_primitive(PrimitiveKind::Sphere, {0.1}, 256, 1), Pose{center, Quat::Identity()}}}, false));
    const ViewSample sv = render_view(sphere, Pose{}, intr);
    const Raster<float> sn = depth_to_normals(sv.depth, intr);
    double sum = 0.0;
    std::size_t count = 0;
    for (int r = 0; r < intr.height; ++r) {
        for (int c = 0; c < intr.width; ++c) {
            const Vec3 e(sn.at(r, c, 0), sn.at(r, c, 1), sn.at(r, c, 2));
            if (e.isZero()) continue;
            const Vec3 p = back_project({double(c), double(r)}, sv.depth.at(r, c), intr);
            sum += angle_deg(e, p - center);
            ++count;
        }
    }
    const double mean = count ? sum / count : 180.0;
    chk.expect(count > 10000, "sphere interior has " + std::to_string(count) + " pixels");
    chk.expect(mean < 3.0, "sphere mean " + fmt("%.3f", mean));
    return chk.outcome("plane worst " + fmt("%.4f", plane_worst) + " deg, sphere mean " + fmt("%.3f", mean) +
                       " deg over " + std::to_string(count) + " px");
}

Outcome bvh_correctness() {
    Checker chk;
    const AcceleratedScene scene(Scene({{make_primitive(PrimitiveKind::Cylinder, {0.04, 0.30}, 250, 1),
                                         Pose{Vec3(0, 0, 0.15), Quat::Identity()}}},
                                       false));
    chk.expect(scene.triangle_count() == 1000, "triangle count " + std::to_string(scene.triangle_count()));
    std::mt19937_64 rng(77);
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> ux(-0.05, 0.05), uz(-0.02, 0.32);
    std::size_t mismatches = 0, hits = 0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 target(ux(rng), ux(rng), uz(rng));
        const Vec3 origin = Vec3(0, 0, 0.15) + 0.5 * Vec3(n(rng), n(rng), n(rng)).normalized();
        const Ray ray{origin, (target - origin).normalized()};
        const auto a = scene.raycast(ray);
        const auto b = scene.raycast_brute_force(ray);
        if (a.has_value() != b.has_value()) {
            ++mismatches;
            continue;
        }
        if (!a) continue;
        ++hits;
        mismatches += a->object_id != b->object_id || a->triangle_index != b->triangle_index ||
                      std::abs(a->t - b->t) > 1e-9;
    }
    chk.expect(mismatches == 0, std::to_string(mismatches) + " discrepancies");
    return chk.outcome("10000 rays (" + std::to_string(hits) + " hits), " + std::to_string(mismatches) +
                       " discrepancies");
}

Outcome grasp_labeling() {
    Checker chk;
    const SceneConfig config = canonical_cylinder_config();
    const AcceleratedScene scene(build_scene(config));
    const GripperModel gripper = config.gripper;
    const Intrinsics intr = Intrinsics{}.rescaled(64, 64);
    const int stride = 4;
    const Prism prism;
    std::size_t base_checked = 0, oracle_compared = 0, oracle_mismatch = 0, mid_ok = 0;
    const auto poses = canonical_poses(4);
    for (std::size_t k = 0; k < poses.size(); ++k) {
        const std::string tag = "view " + std::to_string(k) + ": ";
        const ViewSample v = render_view(scene, poses[k], intr);
        const LabelResult lr = label_view(scene, v, gripper, config.target_id, stride);

        // support invariant and stride bookkeeping
        std::size_t target_seen = 0, support_bad = 0;
        for (int r = 0; r < 64; ++r) {
            for (int c = 0; c < 64; ++c) {
                const int l = lr.labels.at(r, c);
                if (v.segmentation.at(r, c) == config.target_id) {
                    support_bad += (l != -1) != (target_seen % stride == 0);
                    ++target_seen;
                } else {
                    support_bad += l != -1;
                }
            }
        }
        chk.expect(support_bad == 0, tag + std::to_string(support_bad) + " support violations");

        // mid-height pixel: the surface point at z = 0.15 facing the camera
        const Vec3 eye = poses[k].position;
        const Vec3 mid = Vec3(0, 0, 0.15) + 0.04 * Vec3(eye.x(), eye.y(), 0).normalized();
        const Projection pr = project(poses[k].inverse().transform_point(mid), intr);
        double best = 1e9;
        int best_label = -2;
        for (int r = 0; r < 64; ++r) {
            for (int c = 0; c < 64; ++c) {
                if (lr.labels.at(r, c) == -1) continue;
                const double d = std::hypot(c - pr.pixel.u, r - pr.pixel.v);
                if (d < best) best = d, best_label = lr.labels.at(r, c);
            }
        }
        chk.expect(best <= 3.0 && best_label == 1, tag + "mid-height label " + std::to_string(best_label));
        mid_ok += best <= 3.0 && best_label == 1;

        // base-adjacent: side pixels whose palm (height 0.06, level with the
        // surface point) reaches below the ground must fail by collision
        for (int r = 0; r < 64; ++r) {
            for (int c = 0; c < 64; ++c) {
                if (lr.labels.at(r, c) == -1) continue;
                const Vec3 p = v.camera_pose.transform_point(back_project({double(c), double(r)}, v.depth.at(r, c), intr));
                const Vec3 n = v.camera_pose.rotate(Vec3(v.normals.at(r, c, 0), v.normals.at(r, c, 1), v.normals.at(r, c, 2)));
                if (std::abs(n.z()) > 0.1 || p.z() >= 0.5 * gripper.palm_height - 1e-3) continue;
                ++base_checked;
                chk.expect(lr.labels.at(r, c) == 0 &&
                               lr.reasons.at(r, c) == static_cast<std::uint8_t>(FailureReason::ExternalCollision),
                           tag + "base pixel (" + std::to_string(c) + "," + std::to_string(r) + ") not a collision");
            }
        }

        // closing sweep vs 1 mm voxel march on a 16x16 subsample of the target box
        int rmin = 64, rmax = -1, cmin = 64, cmax = -1;
        for (int r = 0; r < 64; ++r) {
            for (int c = 0; c < 64; ++c) {
                if (v.segmentation.at(r, c) != config.target_id) continue;
                rmin = std::min(rmin, r), rmax = std::max(rmax, r), cmin = std::min(cmin, c), cmax = std::max(cmax, c);
            }
        }
        for (int i = 0; i < 16 && rmax >= 0; ++i) {
            for (int j = 0; j < 16; ++j) {
                const int r = rmin + (rmax - rmin) * i / 15, c = cmin + (cmax - cmin) * j / 15;
                if (v.segmentation.at(r, c) != config.target_id) continue;
                const GraspPose g = plan_grasp_pose({double(c), double(r)}, v, gripper, config.grasp, config.target_id);
                const SweepResult s = closing_sweep(scene, g, gripper, config.target_id, gripper.max_aperture);
                for (int f = 0; f < 2; ++f) {
                    const int side = f == 0 ? 1 : -1;
                    const Vec3 dir = -side * g.jaw_axis();
                    int hits = 0;
                    for (const Vec3& local : gripper.pad_points(side, gripper.max_aperture)) {
                        const Vec3 start = g.gripper_pose.transform_point(local);
                        bool touched = false;
                        const int steps = static_cast<int>(std::round(gripper.max_aperture / 0.001));
                        for (int q = 0; q < steps && !touched; ++q) {
                            const Vec3 x = start + (q + 0.5) * 0.001 * dir;
                            touched = prism.inside(x);
                        }
                        hits += touched;
                    }
                    ++oracle_compared;
                    oracle_mismatch += (s.pad_hits[f] >= gripper.contact_min) != (hits >= gripper.contact_min);
                }
            }
        }
    }
    chk.expect(base_checked > 0, "no base-adjacent pixel in any view");
    chk.expect(oracle_compared > 0 && oracle_mismatch == 0,
               std::to_string(oracle_mismatch) + "/" + std::to_string(oracle_compared) + " sweep mismatches");
    return chk.outcome("4 views: mid-height ok in " + std::to_string(mid_ok) + ", " + std::to_string(base_checked) +
                       " base pixels collide, sweep agrees on " + std::to_string(oracle_compared - oracle_mismatch) +
                       "/" + std::to_string(oracle_compared) + " fingers");
}

Outcome rigid_motion_equivariance() {
    Checker chk;
    const SceneConfig config = canonical_cylinder_config();
    const Scene base = build_scene(config);
    const AcceleratedScene scene(base);
    const Intrinsics intr = Intrinsics{}.rescaled(64, 64);
    const std::vector<std::pair<std::string, Pose>> motions{
        {"translation", Pose{Vec3(0.3, -0.2, 0.0), Quat::Identity()}},
        {"yaw 30", Pose{Vec3::Zero(), canonical(Quat(Eigen::AngleAxisd(std::numbers::pi / 6, Vec3::UnitZ())))}}};
    std::size_t flips = 0, labeled = 0;
    for (const auto& [name, motion] : motions) {
        const AcceleratedScene moved(base.transformed(motion));
        for (const Pose& pose : canonical_poses(4)) {
            const LabelResult a = label_view(scene, render_view(scene, pose, intr), config.gripper, config.target_id, 8);
            const LabelResult b =
                label_view(moved, render_view(moved, motion.compose(pose), intr), config.gripper, config.target_id, 8);
            std::size_t f = 0;
            for (std::size_t i = 0; i < a.labels.data().size(); ++i) f += a.labels.data()[i] != b.labels.data()[i];
            chk.expect(f == 0, name + ": " + std::to_string(f) + " flips");
            flips += f;
            labeled += a.sampled_pixels;
        }
    }
    chk.expect(labeled > 0, "nothing labeled");
    return chk.outcome(std::to_string(flips) + " flips over " + std::to_string(labeled) + " labeled pixels");
}

Outcome oracle_pipeline() {
    Checker chk;
    ScratchDir tmp("oracle");
    const fs::path data = tmp.path() / "data";
    const std::string scene_json = std::string(PIXGRASP_SOURCE_DIR) + "/tools/scenes/cylinder.json";
    int rc = run_cli("generate --config \"" + scene_json + "\" --out \"" + data.string() +
                     "\" --views 4 --res 160x120 --stride 2");
    chk.expect(rc == 0, "generate exit " + std::to_string(rc));
    const fs::path report = tmp.path() / "report.json";
    rc = run_cli("eval --dataset \"" + data.string() + "\" --predictor oracle --report \"" + report.string() + "\"");
    chk.expect(rc == 0, "eval exit " + std::to_string(rc));
    double p = 0, r = 0, iou = 0;
    if (rc == 0) {
        const Json j = read_json_file(report);
        p = j.at("pooled").at("precision").get<double>();
        r = j.at("pooled").at("recall").get<double>();
        iou = j.at("pooled").at("iou").get<double>();
        chk.expect(p == 1.0 && r == 1.0 && iou == 1.0, "pooled metrics not exactly 1");
        for (const auto& v : j.at("views")) {
            const auto& m = v.at("metrics");
            chk.expect(m.at("precision").get<double>() == 1.0 && m.at("recall").get<double>() == 1.0 &&
                           m.at("iou").get<double>() == 1.0,
                       v.at("dir").get<std::string>() + " metrics not exactly 1");
        }
    }
    std::size_t picked_positive = 0, with_positive = 0;
    if (fs::exists(data / kManifestFile)) {
        const DatasetManifest m = read_manifest(data);
        for (const ManifestView& mv : m.views) {
            const StoredView s = read_view(data / mv.dir);
            const fs::path out = tmp.path() / (mv.dir + ".json");
            rc = run_cli("infer --view \"" + (data / mv.dir).string() + "\" --predictor oracle --out \"" + out.string() + "\"");
            if (mv.positive_pixels == 0) {
                chk.expect(rc == 2, mv.dir + ": no positives but exit " + std::to_string(rc));
                continue;
            }
            ++with_positive;
            chk.expect(rc == 0, mv.dir + ": infer exit " + std::to_string(rc));
            if (rc != 0) continue;
            const Json g = read_json_file(out);
            const int u = static_cast<int>(g.at("pixel").at("u").get<double>());
            const int v = static_cast<int>(g.at("pixel").at("v").get<double>());
            const bool pos = s.labels->at(v, u) == 1;
            chk.expect(pos, mv.dir + ": selected pixel label is not 1");
            picked_positive += pos;
        }
    }
    chk.expect(with_positive > 0, "no view has a positive label");
    return chk.outcome("eval precision/recall/iou " + fmt("%.9g", p) + "/" + fmt("%.9g", r) + "/" + fmt("%.9g", iou) +
                       ", infer picked a positive in " + std::to_string(picked_positive) + "/" +
                       std::to_string(with_positive) + " views");
}

Outcome heuristic_baseline() {
    Checker chk;
    ScratchDir tmp("heuristic");
    SceneConfig config = canonical_cylinder_config();
    config.intrinsics = Intrinsics{}.rescaled(320, 240);
    config.stride = 1;
    generate_dataset(config, tmp.path(), 50);
    const DatasetEvaluation e = evaluate_dataset(tmp.path(), Predictor::parse("heuristic"), 0.85);
    const double floor = 1.5 * e.positive_base_rate;
    chk.expect(e.mean_precision > floor,
               "mean precision " + fmt("%.4f", e.mean_precision) + " <= 1.5 x base rate " + fmt("%.4f", floor));
    return chk.outcome("50 views, mean precision " + fmt("%.4f", e.mean_precision) + " over " +
                       std::to_string(e.precision_views) + " views, base rate " + fmt("%.4f", e.positive_base_rate) +
                       ", floor " + fmt("%.4f", floor));
}

Outcome dataset_round_trip() {
    Checker chk;
    ScratchDir tmp("roundtrip");
    SceneConfig config = canonical_cylinder_config();
    config.intrinsics = Intrinsics{}.rescaled(160, 120);
    config.stride = 2;
    const DatasetManifest written = generate_dataset(config, tmp.path(), 4);
    const DatasetManifest m = read_manifest(tmp.path());
    chk.expect(m.views.size() == 4, "manifest has " + std::to_string(m.views.size()) + " views");
    chk.expect(manifest_to_json(m) == manifest_to_json(written), "manifest changed on read");

    const AcceleratedScene scene(build_scene(config));
    const auto grid = sample_camera_grid(config.grid, config.grid_target);
    std::size_t bytes_checked = 0;
    for (const ManifestView& mv : m.views) {
        const GeneratedView g = generate_view(scene, config, grid[mv.grid_index], mv.grid_index);
        const StoredView s = read_view(tmp.path() / mv.dir);
        const std::string tag = mv.dir + ": ";
        auto same_bits = [](const Raster<float>& a, const Raster<float>& b) {
            return a.same_shape(b) && a.channels() == b.channels() &&
                   std::memcmp(a.data().data(), b.data().data(), a.data().size_bytes()) == 0;
        };
        chk.expect(same_bits(s.view.depth, g.view.depth), tag + "depth not bit-exact");
        chk.expect(same_bits(s.view.normals, g.view.normals), tag + "normals not bit-exact");
        chk.expect(s.view.segmentation == g.view.segmentation, tag + "segmentation differs");
        chk.expect(s.labels && *s.labels == g.labels.labels, tag + "labels differ");
        // 8-bit RGB: stored bytes are round(255 c)
        const Raster<std::uint8_t> rgb = read_png8(tmp.path() / mv.dir / kRgbFile);
        bool rgb_ok = rgb.channels() == 3 && rgb.same_shape(g.view.rgb);
        for (std::size_t i = 0; rgb_ok && i < rgb.data().size(); ++i) {
            rgb_ok = rgb.data()[i] == static_cast<std::uint8_t>(std::lround(255.0 * g.view.rgb.data()[i]));
        }
        chk.expect(rgb_ok, tag + "rgb bytes differ");
        // label PNG bytes
        const Raster<std::uint8_t> lb = read_png8(tmp.path() / mv.dir / kLabelsFile);
        bool label_ok = lb.same_shape(g.labels.labels) && lb.channels() == 1;
        for (std::size_t i = 0; label_ok && i < lb.data().size(); ++i) {
            const int l = g.labels.labels.data()[i];
            const int expect = l == 1 ? 255 : l == 0 ? 0 : 128;
            label_ok = lb.data()[i] == expect;
            ++bytes_checked;
        }
        chk.expect(label_ok, tag + "label bytes do not follow 1->255, 0->0, -1->128");
    }
    return chk.outcome("4 views read back exactly, " + std::to_string(bytes_checked) + " label bytes verified");
}

Outcome grasp_command_contract() {
    Checker chk;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec3 nrm = Vec3(n(rng), n(rng), n(rng)).normalized();
        worst = std::max(worst, (grasp_orientation_from_normal(nrm) * Vec3::UnitX() + nrm).norm());
    }
    for (const Vec3& nrm : {Vec3(Vec3::UnitZ()), Vec3(-Vec3::UnitZ()), Vec3(Vec3::UnitX()), Vec3(Vec3::UnitY())}) {
        worst = std::max(worst, (grasp_orientation_from_normal(nrm) * Vec3::UnitX() + nrm).norm());
    }
    chk.expect(worst <= 1e-6, "orientation error " + fmt("%.3g", worst));

    // On real views through the whole pipeline.
    SceneConfig config = canonical_cylinder_config();
    config.intrinsics = Intrinsics{}.rescaled(160, 120);
    const AcceleratedScene scene(build_scene(config));
    const auto grid = sample_camera_grid(config.grid, config.grid_target);
    PipelineConfig pc;
    chk.expect(pc.threshold == 0.85 && kDefaultThreshold == 0.85, "default threshold is not 0.85");
    double pipeline_worst = 0.0;
    std::size_t runs = 0;
    for (std::size_t gi : select_grid_indices(grid.size(), 8)) {
        const GeneratedView g = generate_view(scene, config, grid[gi], gi);
        try {
            const PipelineResult r = run_pipeline(g.view, pc);
            pipeline_worst = std::max(pipeline_worst, (r.command.orientation * Vec3::UnitX() + r.normal_world).norm());
            const Json j = grasp_command_to_json(r.command);
            chk.expect(j.at("max_torque").get<double>() == 3.0, "max_torque field");
            ++runs;
        } catch (const ValidationError&) {
            // target out of view or no viable pixel
        }
    }
    chk.expect(runs > 0, "no pipeline run succeeded");
    chk.expect(pipeline_worst <= 1e-6, "pipeline orientation error " + fmt("%.3g", pipeline_worst));
    return chk.outcome("+X vs -normal worst " + fmt("%.3g", std::max(worst, pipeline_worst)) + " over 10004 normals and " +
                       std::to_string(runs) + " pipeline runs, max_torque 3.0, threshold 0.85");
}

struct Criterion {
    const char* name;
    double limit_s;  // 0: no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"back_projection", 1.0, back_projection},
        {"camera_grid", 1.0, camera_grid},
        {"d2nt_accuracy", 10.0, d2nt_accuracy},
        {"bvh_correctness", 30.0, bvh_correctness},
        {"grasp_labeling", 120.0, grasp_labeling},
        {"rigid_motion_equivariance", 0.0, rigid_motion_equivariance},
        {"oracle_pipeline", 0.0, oracle_pipeline},
        {"heuristic_baseline", 300.0, heuristic_baseline},
        {"dataset_round_trip", 0.0, dataset_round_trip},
        {"grasp_command_contract", 0.0, grasp_command_contract},
    };
    std::vector<std::string> wanted(argv + 1, argv + argc);
    for (const auto& w : wanted) {
        if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return w == c.name; })) {
            std::fprintf(stderr, "unknown criterion '%s'\n", w.c_str());
            return 2;
        }
    }
    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string timing = fmt("%.2f s", secs);
        if (c.limit_s > 0.0) {
            timing += fmt(" (limit %.0f s)", c.limit_s);
            if (secs >= c.limit_s) o.pass = false;
        }
        std::printf("%s %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), timing.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}

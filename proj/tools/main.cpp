// pixgrasp command-line front end.
//
// Exit codes: 0 success, 2 validation error, 3 I/O error.

#include "pixgrasp/d2nt.hpp"
#include "pixgrasp/dataset.hpp"
#include "pixgrasp/errors.hpp"
#include "pixgrasp/image_io.hpp"
#include "pixgrasp/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <regex>

namespace fs = std::filesystem;
using namespace pixgrasp;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

std::pair<int, int> parse_resolution(const std::string& text) {
    static const std::regex re(R"((\d+)[xX](\d+))");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw ValidationError("--res expects WxH, got '" + text + "'");
    const int w = std::stoi(m[1]), h = std::stoi(m[2]);
    if (w < 2 || h < 2) throw ValidationError("--res is too small");
    return {w, h};
}

struct GenerateArgs {
    std::string config;
    std::string out;
    std::optional<std::size_t> views;
    std::optional<int> stride;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> res;
};

int run_generate(const GenerateArgs& a) {
    SceneConfig config = load_scene_config(a.config);
    if (a.stride) {
        if (*a.stride < 1) throw ValidationError("--stride must be >= 1");
        config.stride = *a.stride;
    }
    if (a.seed) config.grid.seed = *a.seed;
    if (a.res) {
        const auto [w, h] = parse_resolution(*a.res);
        config.intrinsics = config.intrinsics.rescaled(w, h);
    }
    const DatasetManifest m = generate_dataset(config, a.out, a.views);
    std::size_t sampled = 0, positive = 0;
    for (const ManifestView& v : m.views) {
        sampled += v.sampled_pixels;
        positive += v.positive_pixels;
    }
    std::printf("wrote %zu views to %s (%zu labeled pixels, %zu positive)\n", m.views.size(), a.out.c_str(), sampled,
                positive);
    return 0;
}

int run_normals(const std::string& depth_path, const std::string& intr_path, const std::string& out) {
    const Intrinsics intr = intrinsics_from_json(read_json_file(intr_path));
    const Raster<float> depth = read_pfm(depth_path);
    if (depth.channels() != 1) throw ValidationError(depth_path + ": depth must be a 1-channel PFM");
    write_pfm(out, depth_to_normals(depth, intr));
    return 0;
}

int run_infer(const std::string& view_dir, const std::string& predictor, const std::string& mask,
              const std::string& out, double threshold) {
    PipelineConfig config;
    config.predictor = Predictor::parse(predictor);
    config.threshold = threshold;
    if (!mask.empty()) config.mask_path = mask;
    // gripper and grasp parameters come from the dataset manifest when there is one
    const fs::path root = fs::path(view_dir).lexically_normal().parent_path();
    if (fs::exists(root / kManifestFile)) {
        const DatasetManifest m = read_manifest(root);
        config.gripper = m.gripper;
        config.grasp = m.grasp;
        config.depth_normalization_scale = m.depth_normalization_scale;
        config.target_id = m.target_id;
    }
    const PipelineResult r = run_pipeline(fs::path(view_dir), config);
    write_json_file(out, grasp_command_to_json(r.command));
    std::printf("pixel (%d, %d) q=%.4f -> %s\n", r.selection.col, r.selection.row, r.selection.q_value, out.c_str());
    return 0;
}

int run_eval(const std::string& dataset, const std::string& predictor, double threshold, const std::string& report) {
    const DatasetEvaluation e = evaluate_dataset(dataset, Predictor::parse(predictor), threshold);
    write_json_file(report, dataset_evaluation_to_json(e));
    std::printf("precision %.6f recall %.6f iou %.6f (pooled over %zu views); mean precision %.6f; base rate %.6f\n",
                e.pooled.precision, e.pooled.recall, e.pooled.iou, e.views.size(), e.mean_precision,
                e.positive_base_rate);
    return 0;
}

int run_bench(const std::string& dataset, int repeat, const std::string& predictor, const std::string& out) {
    if (repeat < 1) throw ValidationError("--repeat must be >= 1");
    const DatasetManifest m = read_manifest(dataset);
    PipelineConfig config;
    config.predictor = Predictor::parse(predictor);
    config.gripper = m.gripper;
    config.grasp = m.grasp;
    config.depth_normalization_scale = m.depth_normalization_scale;

    std::map<std::string, std::vector<double>> samples;
    std::size_t runs = 0, skipped = 0;
    for (int rep = 0; rep < repeat; ++rep) {
        for (const ManifestView& mv : m.views) {
            const StoredView stored = read_view(fs::path(dataset) / mv.dir);
            config.target_id = stored.target_id.value_or(m.target_id);
            const GraspLabelMap* labels = stored.labels ? &*stored.labels : nullptr;
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const PipelineResult r = run_pipeline(stored.view, config, labels);
                const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                for (const StageTiming& t : r.timings) samples[t.stage].push_back(t.seconds);
                samples["total"].push_back(total);
                ++runs;
            } catch (const EmptyMaskError&) {
                ++skipped;
            } catch (const NoViablePixelError&) {
                ++skipped;
            }
        }
    }
    Json stages = Json::object();
    for (auto& [name, v] : samples) {
        std::sort(v.begin(), v.end());
        double sum = 0.0;
        for (double x : v) sum += x;
        stages[name] = Json{{"count", v.size()},
                            {"mean_s", round9(sum / double(v.size()))},
                            {"median_s", round9(v[v.size() / 2])},
                            {"min_s", round9(v.front())},
                            {"max_s", round9(v.back())}};
    }
    const Json report{{"dataset", dataset}, {"predictor", config.predictor.name()}, {"repeat", repeat},
                      {"runs", runs},       {"skipped_views", skipped},             {"stages", stages}};
    if (out.empty()) {
        std::cout << report.dump(2) << '\n';
    } else {
        write_json_file(out, report);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pixgrasp: synthetic grasp dataset generation and pixel-wise grasp selection"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "render and label a camera-grid dataset");
    generate->add_option("--config", gen.config, "scene.json")->required();
    generate->add_option("--out", gen.out, "output directory")->required();
    generate->add_option("--views", gen.views, "number of grid views to keep (evenly spaced)");
    generate->add_option("--stride", gen.stride, "label every S-th object pixel");
    generate->add_option("--seed", gen.seed, "jitter seed");
    generate->add_option("--res", gen.res, "image size WxH (intrinsics are rescaled)");

    std::string depth, intr, normals_out;
    auto* normals = app.add_subcommand("normals", "depth PFM to normal PFM");
    normals->add_option("--depth", depth, "1-channel depth PFM")->required();
    normals->add_option("--intrinsics", intr, "intrinsics JSON")->required();
    normals->add_option("--out", normals_out, "output 3-channel PFM")->required();

    std::string view_dir, predictor = "heuristic", mask, infer_out;
    double threshold = kDefaultThreshold;
    auto* infer = app.add_subcommand("infer", "select a grasp on one stored view");
    infer->add_option("--view", view_dir, "view directory (DIR/view_NNNN)")->required();
    infer->add_option("--predictor", predictor, "heuristic | oracle | heatmap:PATH");
    infer->add_option("--mask", mask, "gray PNG mask replacing the segmentation");
    infer->add_option("--threshold", threshold, "high-quality region threshold");
    infer->add_option("--out", infer_out, "grasp.json")->required();

    std::string dataset, eval_predictor = "heuristic", report;
    double eval_threshold = kDefaultThreshold;
    auto* eval = app.add_subcommand("eval", "score a predictor against dataset labels");
    eval->add_option("--dataset", dataset, "dataset directory")->required();
    eval->add_option("--predictor", eval_predictor, "heuristic | oracle | heatmap:DIR");
    eval->add_option("--threshold", eval_threshold, "binarization threshold");
    eval->add_option("--report", report, "report.json")->required();

    std::string bench_dataset, bench_predictor = "heuristic", bench_out;
    int repeat = 1;
    auto* bench = app.add_subcommand("bench", "per-stage pipeline timings over a dataset");
    bench->add_option("--dataset", bench_dataset, "dataset directory")->required();
    bench->add_option("--repeat", repeat, "passes over the dataset");
    bench->add_option("--predictor", bench_predictor, "heuristic | oracle");
    bench->add_option("--out", bench_out, "write JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*generate) return run_generate(gen);
        if (*normals) return run_normals(depth, intr, normals_out);
        if (*infer) return run_infer(view_dir, predictor, mask, infer_out, threshold);
        if (*eval) return run_eval(dataset, eval_predictor, eval_threshold, report);
        if (*bench) return run_bench(bench_dataset, repeat, bench_predictor, bench_out);
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return 0;
}

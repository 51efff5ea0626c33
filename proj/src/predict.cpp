#include "pixgrasp/predict.hpp"

#include "pixgrasp/errors.hpp"
#include "pixgrasp/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pixgrasp {

namespace {

// Squared distance transform of a sampled function (Felzenszwalb-Huttenlocher).
// f must be finite; "no site" is encoded as a large value.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    const double inf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    for (int q = 1; q < n; ++q) {
        double s = 0.0;
        while (true) {
            const int p = v[k];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s > z[k]) break;  // z[0] = -inf stops the walk
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const int p = v[k];
        d[q] = (q - p) * double(q - p) + f[p];
    }
}

void check_mask(const Mask& mask, int width, int height, const char* what) {
    if (!mask.same_shape(width, height) || mask.channels() != 1) {
        throw ValidationError(std::string(what) + ": mask size does not match");
    }
}

}  // namespace

Predictor Predictor::parse(const std::string& text) {
    if (text == "heuristic") return {PredictorKind::Heuristic, {}};
    if (text == "oracle") return {PredictorKind::Oracle, {}};
    const std::string prefix = "heatmap:";
    if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size()) {
        return {PredictorKind::Heatmap, text.substr(prefix.size())};
    }
    throw ValidationError("unknown predictor '" + text + "' (expected heuristic, oracle or heatmap:PATH)");
}

std::string Predictor::name() const {
    switch (kind) {
        case PredictorKind::Heuristic: return "heuristic";
        case PredictorKind::Oracle: return "oracle";
        case PredictorKind::Heatmap: return "heatmap:" + heatmap.string();
    }
    return "";
}

Mask mask_from_segmentation(const Raster<std::uint16_t>& segmentation, ObjectId target_id) {
    Mask mask(segmentation.width(), segmentation.height(), 1, 0);
    for (std::size_t i = 0; i < mask.data().size(); ++i) {
        mask.data()[i] = segmentation.data()[i] == target_id ? 1 : 0;
    }
    return mask;
}

Mask load_mask(const std::filesystem::path& path, int width, int height) {
    const Raster<std::uint16_t> gray = read_png_gray_any(path);
    if (!gray.same_shape(width, height)) {
        throw ValidationError(path.string() + ": mask is " + std::to_string(gray.width()) + "x" +
                              std::to_string(gray.height()) + ", view is " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    Mask mask(width, height, 1, 0);
    for (std::size_t i = 0; i < mask.data().size(); ++i) mask.data()[i] = gray.data()[i] != 0 ? 1 : 0;
    return mask;
}

std::size_t mask_count(const Mask& mask) {
    return static_cast<std::size_t>(std::count_if(mask.data().begin(), mask.data().end(), [](auto m) { return m != 0; }));
}

Raster<float> distance_to_mask_boundary(const Mask& mask) {
    const int w = mask.width(), h = mask.height();
    // one-pixel ring of background around the image
    const int pw = w + 2, ph = h + 2;
    constexpr double kFar = 1e20;
    std::vector<double> grid(static_cast<std::size_t>(pw) * ph, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) grid[(r + 1) * pw + c + 1] = mask.at(r, c) ? kFar : 0.0;
    }
    const int n = std::max(pw, ph);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    for (int c = 0; c < pw; ++c) {
        f.resize(ph);
        d.resize(ph);
        for (int r = 0; r < ph; ++r) f[r] = grid[r * pw + c];
        edt_1d(f, d, v, z);
        for (int r = 0; r < ph; ++r) grid[r * pw + c] = d[r];
    }
    for (int r = 0; r < ph; ++r) {
        f.resize(pw);
        d.resize(pw);
        for (int c = 0; c < pw; ++c) f[c] = grid[r * pw + c];
        edt_1d(f, d, v, z);
        for (int c = 0; c < pw; ++c) grid[r * pw + c] = d[c];
    }
    Raster<float> out(w, h, 1, 0.0f);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (mask.at(r, c)) out.at(r, c) = static_cast<float>(std::sqrt(grid[(r + 1) * pw + c + 1]));
        }
    }
    return out;
}

QualityMap heuristic_quality(const Mask& mask, const Raster<float>& d2nt_normals) {
    const int w = mask.width(), h = mask.height();
    if (!d2nt_normals.same_shape(w, h) || d2nt_normals.channels() != 3) {
        throw ValidationError("heuristic: normal map size does not match the mask");
    }
    const Raster<float> dist = distance_to_mask_boundary(mask);
    QualityMap q(w, h, 1, 0.0f);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c)) continue;
            const double facing = std::clamp(-static_cast<double>(d2nt_normals.at(r, c, 2)), 0.0, 1.0);
            const double edge = std::min(1.0, dist.at(r, c) / kHeuristicEdgeReference);
            q.at(r, c) = static_cast<float>(facing * edge);
        }
    }
    return q;
}

QualityMap oracle_quality(const GraspLabelMap& labels, const Mask& mask) {
    check_mask(mask, labels.width(), labels.height(), "oracle");
    QualityMap q(labels.width(), labels.height(), 1, 0.0f);
    for (std::size_t i = 0; i < q.data().size(); ++i) {
        q.data()[i] = labels.data()[i] == 1 && mask.data()[i] ? 1.0f : 0.0f;
    }
    return q;
}

QualityMap heatmap_quality(const std::filesystem::path& path, const Mask& mask) {
    QualityMap q = read_pfm(path);
    if (q.channels() != 1) throw ValidationError(path.string() + ": heatmap must be a 1-channel PFM");
    if (!q.same_shape(mask)) {
        throw ValidationError(path.string() + ": heatmap is " + std::to_string(q.width()) + "x" +
                              std::to_string(q.height()) + ", view is " + std::to_string(mask.width()) + "x" +
                              std::to_string(mask.height()));
    }
    for (std::size_t i = 0; i < q.data().size(); ++i) {
        float& x = q.data()[i];
        if (std::isnan(x)) throw ValidationError(path.string() + ": heatmap contains NaN");
        x = mask.data()[i] ? std::clamp(x, 0.0f, 1.0f) : 0.0f;
    }
    return q;
}

QualityMap predict_quality(const ViewSample& view, const Predictor& predictor, const Mask& mask,
                           const Raster<float>* d2nt_normals, const GraspLabelMap* labels) {
    check_mask(mask, view.width(), view.height(), "predict");
    QualityMap q;
    switch (predictor.kind) {
        case PredictorKind::Heuristic:
            if (!d2nt_normals) throw ValidationError("heuristic predictor needs a d2nt normal map");
            q = heuristic_quality(mask, *d2nt_normals);
            break;
        case PredictorKind::Oracle:
            if (!labels) throw ValidationError("oracle predictor needs ground-truth labels");
            if (!labels->same_shape(view.width(), view.height())) {
                throw ValidationError("oracle: label map size does not match the view");
            }
            q = oracle_quality(*labels, mask);
            break;
        case PredictorKind::Heatmap:
            q = heatmap_quality(predictor.heatmap, mask);
            break;
    }
    for (int r = 0; r < view.height(); ++r) {
        for (int c = 0; c < view.width(); ++c) {
            const bool has_normal = view.normals.at(r, c, 0) != 0.0f || view.normals.at(r, c, 1) != 0.0f ||
                                    view.normals.at(r, c, 2) != 0.0f;
            if (!(view.depth.at(r, c) > 0.0f) || !has_normal) q.at(r, c) = 0.0f;
        }
    }
    return q;
}

Selection select_grasp_pixel(const QualityMap& q, const Mask& mask, double threshold) {
    check_mask(mask, q.width(), q.height(), "select_grasp_pixel");
    Selection s;
    bool any = false;
    float best = -1.0f;
    for (int r = 0; r < q.height(); ++r) {
        for (int c = 0; c < q.width(); ++c) {
            if (!mask.at(r, c)) continue;
            any = true;
            const float v = q.at(r, c);
            if (v > best) {
                best = v;
                s.col = c;
                s.row = r;
            }
            if (v >= threshold) s.region.emplace_back(c, r);
        }
    }
    if (!any) throw EmptyMaskError("target mask is empty");
    if (!(best > 0.0f)) throw NoViablePixelError("quality is zero on every mask pixel");
    s.q_value = best;
    return s;
}

void EvalMetrics::finalize() {
    auto ratio = [](std::size_t num, std::size_t den) { return den == 0 ? 1.0 : double(num) / double(den); };
    precision = ratio(tp, tp + fp);
    recall = ratio(tp, tp + fn);
    iou = ratio(tp, tp + fp + fn);
}

EvalMetrics& EvalMetrics::operator+=(const EvalMetrics& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    tn += other.tn;
    finalize();
    return *this;
}

EvalMetrics evaluate(const QualityMap& q, const GraspLabelMap& labels, double threshold) {
    if (!q.same_shape(labels) || q.channels() != 1) throw ValidationError("evaluate: size mismatch");
    EvalMetrics m;
    m.threshold = threshold;
    for (std::size_t i = 0; i < q.data().size(); ++i) {
        const std::int8_t l = labels.data()[i];
        if (l == -1) continue;
        const bool predicted = q.data()[i] >= threshold;
        if (predicted && l == 1) ++m.tp;
        else if (predicted) ++m.fp;
        else if (l == 1) ++m.fn;
        else ++m.tn;
    }
    m.finalize();
    return m;
}

}  // namespace pixgrasp

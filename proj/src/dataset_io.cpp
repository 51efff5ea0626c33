#include "pixgrasp/dataset_io.hpp"

#include "pixgrasp/d2nt.hpp"
#include "pixgrasp/errors.hpp"
#include "pixgrasp/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fs = std::filesystem;

namespace pixgrasp {

namespace {

void require_file(const fs::path& p) {
    if (!fs::is_regular_file(p)) throw IoError("missing file " + p.string());
}

Json view_files_json(const std::string& prefix, bool with_labels) {
    Json files{{"rgb", prefix + kRgbFile},
               {"depth", prefix + kDepthFile},
               {"segmentation", prefix + kSegmentationFile},
               {"normals", prefix + kNormalsFile}};
    if (with_labels) files["labels"] = prefix + kLabelsFile;
    return files;
}

}  // namespace

std::uint8_t label_to_byte(std::int8_t label) {
    switch (label) {
        case 1: return 255;
        case 0: return 0;
        case -1: return 128;
        default: throw ValidationError("label value " + std::to_string(label) + " is not in {1, 0, -1}");
    }
}

std::int8_t byte_to_label(std::uint8_t byte) {
    switch (byte) {
        case 255: return 1;
        case 0: return 0;
        case 128: return -1;
        default: throw ValidationError("label byte " + std::to_string(byte) + " is not in {0, 128, 255}");
    }
}

std::string view_dir_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "view_%04zu", index);
    return buf;
}

void write_view(const fs::path& dir, const ViewSample& view, const GraspLabelMap* labels,
                std::optional<ObjectId> target_id) {
    view.validate();
    const int w = view.width(), h = view.height();
    if (labels && !labels->same_shape(w, h)) throw ValidationError("label map size does not match the view");

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    Raster<std::uint8_t> rgb(w, h, 3);
    const auto src = view.rgb.data();
    auto dst = rgb.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<std::uint8_t>(std::lround(std::clamp(src[i], 0.0f, 1.0f) * 255.0f));
    }
    write_png8(dir / kRgbFile, rgb);
    write_pfm(dir / kDepthFile, view.depth);
    write_png16(dir / kSegmentationFile, view.segmentation);
    write_pfm(dir / kNormalsFile, view.normals);
    if (labels) {
        Raster<std::uint8_t> bytes(w, h, 1);
        for (std::size_t i = 0; i < bytes.data().size(); ++i) bytes.data()[i] = label_to_byte(labels->data()[i]);
        write_png8(dir / kLabelsFile, bytes);
    }

    Json meta{{"format_version", kFormatVersion},
              {"camera_pose", pose_to_json(view.camera_pose)},
              {"intrinsics", intrinsics_to_json(view.intrinsics)},
              {"files", view_files_json("", labels != nullptr)}};
    if (target_id) meta["target_id"] = *target_id;
    write_json_file(dir / kViewMetaFile, meta);
}

StoredView read_view(const fs::path& dir) {
    require_file(dir / kViewMetaFile);
    const Json meta = read_json_file(dir / kViewMetaFile);
    if (!meta.is_object()) throw ValidationError(dir.string() + ": view.json is not an object");
    if (meta.value("format_version", 0) != kFormatVersion) {
        throw ValidationError(dir.string() + ": unsupported view format version");
    }

    StoredView out;
    ViewSample& v = out.view;
    try {
        v.camera_pose = pose_from_json(meta.at("camera_pose"));
        v.intrinsics = intrinsics_from_json(meta.at("intrinsics"));
        if (meta.contains("target_id")) out.target_id = meta.at("target_id").get<ObjectId>();
    } catch (const Json::exception& e) {
        throw ValidationError(dir.string() + ": view.json: " + e.what());
    }
    const int w = v.width(), h = v.height();

    for (const char* f : {kRgbFile, kDepthFile, kSegmentationFile, kNormalsFile}) require_file(dir / f);
    const Raster<std::uint8_t> rgb = read_png8(dir / kRgbFile);
    if (!rgb.same_shape(w, h) || rgb.channels() != 3) throw ValidationError(dir.string() + ": rgb.png has the wrong shape");
    v.rgb = Raster<float>(w, h, 3);
    for (std::size_t i = 0; i < rgb.data().size(); ++i) v.rgb.data()[i] = static_cast<float>(rgb.data()[i]) / 255.0f;

    v.depth = read_pfm(dir / kDepthFile);
    if (!v.depth.same_shape(w, h) || v.depth.channels() != 1) {
        throw ValidationError(dir.string() + ": depth.pfm has the wrong shape");
    }
    v.segmentation = read_png16(dir / kSegmentationFile);
    if (!v.segmentation.same_shape(w, h)) throw ValidationError(dir.string() + ": segmentation.png has the wrong shape");
    v.normals = read_pfm(dir / kNormalsFile);
    if (!v.normals.same_shape(w, h) || v.normals.channels() != 3) {
        throw ValidationError(dir.string() + ": normals.pfm has the wrong shape");
    }
    try {
        v.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(dir.string() + ": " + e.what());
    }

    if (fs::exists(dir / kLabelsFile)) {
        const Raster<std::uint8_t> bytes = read_png8(dir / kLabelsFile);
        if (!bytes.same_shape(w, h) || bytes.channels() != 1) {
            throw ValidationError(dir.string() + ": labels.png has the wrong shape");
        }
        GraspLabelMap labels(w, h, 1, -1);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const std::int8_t l = byte_to_label(bytes.at(r, c));
                const std::uint16_t seg = v.segmentation.at(r, c);
                const bool on_target = out.target_id ? seg == *out.target_id : seg != kBackgroundId;
                if (l != -1 && !on_target) {
                    throw ValidationError(dir.string() + ": label outside the target mask at row " +
                                          std::to_string(r) + ", col " + std::to_string(c));
                }
                labels.at(r, c) = l;
            }
        }
        out.labels = std::move(labels);
    }
    return out;
}

Json manifest_to_json(const DatasetManifest& m) {
    Json grid = grid_to_json(m.grid);
    grid["target"] = vec3_to_json(m.grid_target);
    Json views = Json::array();
    for (const ManifestView& v : m.views) {
        views.push_back(Json{{"index", v.index},
                             {"grid_index", v.grid_index},
                             {"x_index", v.x_index},
                             {"z_index", v.z_index},
                             {"camera_pose", pose_to_json(v.camera_pose)},
                             {"jitter", vec3_to_json(v.jitter)},
                             {"dir", v.dir},
                             {"files", view_files_json(v.dir + "/", true)},
                             {"object_pixels", v.object_pixels},
                             {"sampled_pixels", v.sampled_pixels},
                             {"positive_pixels", v.positive_pixels}});
    }
    return Json{{"format_version", m.format_version},
                {"intrinsics", intrinsics_to_json(m.intrinsics)},
                {"grid", grid},
                {"gripper", gripper_to_json(m.gripper)},
                {"grasp", {{"surface_offset", round9(m.grasp.surface_offset)},
                           {"staging_distance", round9(m.grasp.staging_distance)}}},
                {"stride", m.stride},
                {"target_id", m.target_id},
                {"depth_normalization_scale", round9(m.depth_normalization_scale)},
                {"scene", m.scene},
                {"d2nt_variant", kD2ntVariant},
                {"channels", {{"rgb", "8-bit PNG, Lambertian stand-in shading, value/255"},
                              {"depth", "float32 PFM, planar depth in meters, 0 = no surface"},
                              {"segmentation", "16-bit PNG object ids, 0 = background, 65535 = ground"},
                              {"normals", "float32 PFM, camera frame unit normals from mesh faces, 0 = invalid"},
                              {"labels", "8-bit PNG, 255 = success, 0 = failure, 128 = indeterminate or unsampled"}}},
                {"views", views}};
}

DatasetManifest manifest_from_json(const Json& j) {
    DatasetManifest m;
    try {
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kFormatVersion) {
            throw ValidationError("unsupported manifest format_version " + std::to_string(m.format_version));
        }
        m.intrinsics = intrinsics_from_json(j.at("intrinsics"));
        m.grid = grid_from_json(j.at("grid"));
        if (j.at("grid").contains("target")) m.grid_target = vec3_from_json(j.at("grid").at("target"));
        m.gripper = gripper_from_json(j.at("gripper"));
        if (j.contains("grasp")) {
            m.grasp.surface_offset = j.at("grasp").value("surface_offset", m.grasp.surface_offset);
            m.grasp.staging_distance = j.at("grasp").value("staging_distance", m.grasp.staging_distance);
        }
        m.stride = j.at("stride").get<int>();
        m.target_id = j.at("target_id").get<ObjectId>();
        m.depth_normalization_scale = j.value("depth_normalization_scale", m.depth_normalization_scale);
        if (j.contains("scene")) m.scene = j.at("scene");
        for (const Json& v : j.at("views")) {
            ManifestView mv;
            mv.index = v.at("index").get<std::size_t>();
            mv.grid_index = v.value("grid_index", mv.index);
            mv.x_index = v.value("x_index", 0);
            mv.z_index = v.value("z_index", 0);
            mv.camera_pose = pose_from_json(v.at("camera_pose"));
            if (v.contains("jitter")) mv.jitter = vec3_from_json(v.at("jitter"));
            mv.dir = v.at("dir").get<std::string>();
            mv.object_pixels = v.value("object_pixels", std::size_t{0});
            mv.sampled_pixels = v.value("sampled_pixels", std::size_t{0});
            mv.positive_pixels = v.value("positive_pixels", std::size_t{0});
            m.views.push_back(std::move(mv));
        }
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
    return m;
}

void write_manifest(const fs::path& root, const DatasetManifest& m) {
    write_json_file(root / kManifestFile, manifest_to_json(m));
}

DatasetManifest read_manifest(const fs::path& root) {
    require_file(root / kManifestFile);
    const Json j = read_json_file(root / kManifestFile);
    DatasetManifest m = manifest_from_json(j);
    for (const Json& v : j.at("views")) {
        if (!v.contains("files")) continue;
        for (const auto& [name, rel] : v.at("files").items()) require_file(root / rel.get<std::string>());
    }
    for (const ManifestView& v : m.views) require_file(root / v.dir / kViewMetaFile);
    return m;
}

}  // namespace pixgrasp

#include "pixgrasp/dataset.hpp"

#include "pixgrasp/errors.hpp"

namespace fs = std::filesystem;

namespace pixgrasp {

std::vector<std::size_t> select_grid_indices(std::size_t total, std::size_t count) {
    if (count == 0 || count > total) {
        throw ValidationError("view count must be in [1, " + std::to_string(total) + "]");
    }
    std::vector<std::size_t> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = k * total / count;
    return out;
}

GeneratedView generate_view(const AcceleratedScene& scene, const SceneConfig& config, const GridView& grid_view,
                            std::size_t grid_index) {
    GeneratedView g;
    g.grid_view = grid_view;
    g.grid_index = grid_index;
    g.view = render_view(scene, grid_view.pose, config.intrinsics);
    g.labels = label_view(scene, g.view, config.gripper, config.target_id, config.stride, config.grasp);
    return g;
}

DatasetManifest generate_dataset(const SceneConfig& config, const fs::path& out_dir,
                                 std::optional<std::size_t> view_count) {
    const AcceleratedScene scene(build_scene(config));
    const std::vector<GridView> grid = sample_camera_grid(config.grid, config.grid_target);
    const std::vector<std::size_t> indices = select_grid_indices(grid.size(), view_count.value_or(grid.size()));

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    DatasetManifest m;
    m.intrinsics = config.intrinsics;
    m.grid = config.grid;
    m.grid_target = config.grid_target;
    m.gripper = config.gripper;
    m.grasp = config.grasp;
    m.stride = config.stride;
    m.target_id = config.target_id;
    m.depth_normalization_scale = config.depth_normalization_scale;
    m.scene = scene_config_to_json(config);

    for (std::size_t k = 0; k < indices.size(); ++k) {
        const std::size_t gi = indices[k];
        const std::string name = view_dir_name(k);
        try {
            const GeneratedView g = generate_view(scene, config, grid[gi], gi);
            write_view(out_dir / name, g.view, &g.labels.labels, config.target_id);
            ManifestView mv;
            mv.index = k;
            mv.grid_index = gi;
            mv.x_index = g.grid_view.x_index;
            mv.z_index = g.grid_view.z_index;
            mv.camera_pose = g.grid_view.pose;
            mv.jitter = g.grid_view.jitter;
            mv.dir = name;
            mv.object_pixels = g.labels.object_pixels;
            mv.sampled_pixels = g.labels.sampled_pixels;
            mv.positive_pixels = g.labels.positive_pixels;
            m.views.push_back(std::move(mv));
        } catch (const IoError& e) {
            throw IoError("view " + std::to_string(k) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError("view " + std::to_string(k) + ": " + e.what());
        }
    }
    write_manifest(out_dir, m);
    return m;
}

}  // namespace pixgrasp

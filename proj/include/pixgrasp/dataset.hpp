#pragma once

#include "pixgrasp/dataset_io.hpp"
#include "pixgrasp/scene_config.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

namespace pixgrasp {

/// Grid indices used when only `count` of `total` views are wanted:
/// floor(k * total / count) for k in [0, count).
std::vector<std::size_t> select_grid_indices(std::size_t total, std::size_t count);

struct GeneratedView {
    GridView grid_view;
    std::size_t grid_index = 0;
    ViewSample view;
    LabelResult labels;
};

/// Renders and labels one grid view.
GeneratedView generate_view(const AcceleratedScene& scene, const SceneConfig& config, const GridView& grid_view,
                            std::size_t grid_index);

/// For each selected grid pose: render, label, write view_NNNN/, then write
/// manifest.json once at the end. Failures are rethrown with the view index.
DatasetManifest generate_dataset(const SceneConfig& config, const std::filesystem::path& out_dir,
                                 std::optional<std::size_t> view_count = std::nullopt);

}  // namespace pixgrasp

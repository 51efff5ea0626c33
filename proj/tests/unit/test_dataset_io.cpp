#include "pixgrasp/dataset.hpp"
#include "pixgrasp/dataset_io.hpp"
#include "pixgrasp/errors.hpp"
#include "pixgrasp/image_io.hpp"

#include "support.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

using namespace pixgrasp;
using testsupport::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SceneConfig small_config() {
    SceneConfig c = canonical_cylinder_config(32);
    c.intrinsics = Intrinsics{}.rescaled(32, 32);
    c.stride = 4;
    return c;
}

GeneratedView small_view() {
    const SceneConfig c = small_config();
    const AcceleratedScene scene(build_scene(c));
    const auto grid = sample_camera_grid(c.grid, c.grid_target);
    return generate_view(scene, c, grid[500], 500);
}

}  // namespace

TEST(DatasetIo, LabelByteMapping) {
    EXPECT_EQ(label_to_byte(1), 255);
    EXPECT_EQ(label_to_byte(0), 0);
    EXPECT_EQ(label_to_byte(-1), 128);
    EXPECT_EQ(byte_to_label(255), 1);
    EXPECT_EQ(byte_to_label(0), 0);
    EXPECT_EQ(byte_to_label(128), -1);
    EXPECT_THROW(byte_to_label(7), ValidationError);
    EXPECT_THROW(label_to_byte(2), ValidationError);
    EXPECT_EQ(view_dir_name(3), "view_0003");
}

TEST(DatasetIo, PfmIsBitExact) {
    TempDir tmp;
    Raster<float> img(5, 3, 1);
    img.at(0, 0) = 0.123456789f;
    img.at(2, 4) = 3.0e-7f;
    img.at(1, 2) = 1234.5f;
    write_pfm(tmp / "a.pfm", img);
    const Raster<float> back = read_pfm(tmp / "a.pfm");
    ASSERT_TRUE(back.same_shape(img));
    EXPECT_EQ(std::memcmp(back.data().data(), img.data().data(), img.data().size_bytes()), 0);
    // header: color/grey tag, size, little-endian scale
    const std::string raw = slurp(tmp / "a.pfm");
    EXPECT_EQ(raw.substr(0, 12), "Pf\n5 3\n-1.0\n");
    EXPECT_EQ(raw.size(), 12u + 15 * 4);

    Raster<float> rgb(4, 2, 3);
    for (std::size_t i = 0; i < rgb.data().size(); ++i) rgb.data()[i] = -1.0f + 0.1f * static_cast<float>(i);
    write_pfm(tmp / "b.pfm", rgb);
    EXPECT_TRUE(read_pfm(tmp / "b.pfm") == rgb);
}

TEST(DatasetIo, PfmRowsAreStoredTopToBottom) {
    TempDir tmp;
    Raster<float> img(2, 2, 1);
    img.at(0, 0) = 1.0f;
    img.at(1, 1) = 2.0f;
    write_pfm(tmp / "a.pfm", img);
    const std::string raw = slurp(tmp / "a.pfm");
    float first = 0.0f;
    std::memcpy(&first, raw.data() + raw.find("-1.0\n") + 5, 4);
    EXPECT_EQ(first, 1.0f);
}

TEST(DatasetIo, MalformedPfmRejected) {
    TempDir tmp;
    Raster<float> img(8, 8, 1, 1.0f);
    write_pfm(tmp / "a.pfm", img);
    const std::string raw = slurp(tmp / "a.pfm");
    std::ofstream(tmp / "short.pfm", std::ios::binary) << raw.substr(0, raw.size() - 10);
    EXPECT_THROW(read_pfm(tmp / "short.pfm"), ValidationError);
    std::ofstream(tmp / "bad.pfm", std::ios::binary) << "P6\n8 8\n-1.0\n";
    EXPECT_THROW(read_pfm(tmp / "bad.pfm"), ValidationError);
    EXPECT_THROW(read_pfm(tmp / "missing.pfm"), IoError);
}

TEST(DatasetIo, Png16RoundTrip) {
    TempDir tmp;
    Raster<std::uint16_t> seg(7, 5, 1);
    seg.at(1, 1) = 1;
    seg.at(4, 6) = kGroundObjectId;
    seg.at(2, 3) = 300;
    write_png16(tmp / "s.png", seg);
    EXPECT_TRUE(read_png16(tmp / "s.png") == seg);
    EXPECT_TRUE(read_png_gray_any(tmp / "s.png") == seg);
}

TEST(DatasetIo, ViewRoundTrip) {
    TempDir tmp;
    const GeneratedView g = small_view();
    write_view(tmp / "v", g.view, &g.labels.labels, ObjectId{1});
    const StoredView s = read_view(tmp / "v");
    EXPECT_TRUE(s.view.depth == g.view.depth);
    EXPECT_TRUE(s.view.normals == g.view.normals);
    EXPECT_TRUE(s.view.segmentation == g.view.segmentation);
    ASSERT_TRUE(s.labels);
    EXPECT_TRUE(*s.labels == g.labels.labels);
    ASSERT_TRUE(s.target_id);
    EXPECT_EQ(*s.target_id, 1);
    for (std::size_t i = 0; i < g.view.rgb.data().size(); ++i) {
        EXPECT_NEAR(s.view.rgb.data()[i], g.view.rgb.data()[i], 0.5 / 255 + 1e-7);
    }
    EXPECT_LT((s.view.camera_pose.position - g.view.camera_pose.position).norm(), 1e-8);
    EXPECT_LT(s.view.camera_pose.orientation.angularDistance(g.view.camera_pose.orientation), 1e-8);
    EXPECT_EQ(s.view.intrinsics.width, 32);
    EXPECT_NEAR(s.view.intrinsics.fx, g.view.intrinsics.fx, 1e-8 * g.view.intrinsics.fx);

    // A second write of what was read reproduces the lossless channels bytewise.
    write_view(tmp / "w", s.view, &*s.labels, s.target_id);
    for (const char* f : {kDepthFile, kNormalsFile, kSegmentationFile, kLabelsFile, kRgbFile}) {
        EXPECT_EQ(slurp(tmp / "v" / f), slurp(tmp / "w" / f)) << f;
    }
}

TEST(DatasetIo, ViewWithoutLabels) {
    TempDir tmp;
    const GeneratedView g = small_view();
    write_view(tmp / "v", g.view);
    const StoredView s = read_view(tmp / "v");
    EXPECT_FALSE(s.labels);
    EXPECT_FALSE(s.target_id);
    EXPECT_FALSE(std::filesystem::exists(tmp / "v" / kLabelsFile));
}

TEST(DatasetIo, MissingOrCorruptFiles) {
    TempDir tmp;
    const GeneratedView g = small_view();
    write_view(tmp / "v", g.view, &g.labels.labels, ObjectId{1});
    std::filesystem::remove(tmp / "v" / kDepthFile);
    EXPECT_THROW(read_view(tmp / "v"), IoError);
    EXPECT_THROW(read_view(tmp / "nowhere"), IoError);

    write_view(tmp / "w", g.view, &g.labels.labels, ObjectId{1});
    Raster<std::uint8_t> bad(32, 32, 1, 7);
    write_png8(tmp / "w" / kLabelsFile, bad);
    EXPECT_THROW(read_view(tmp / "w"), ValidationError);

    // a positive label on a background pixel
    write_view(tmp / "x", g.view, &g.labels.labels, ObjectId{1});
    GraspLabelMap off = g.labels.labels;
    off.at(0, 0) = 1;
    Raster<std::uint8_t> bytes(32, 32, 1);
    for (std::size_t i = 0; i < off.data().size(); ++i) bytes.data()[i] = label_to_byte(off.data()[i]);
    write_png8(tmp / "x" / kLabelsFile, bytes);
    EXPECT_THROW(read_view(tmp / "x"), ValidationError);

    // wrong size
    write_view(tmp / "y", g.view, &g.labels.labels, ObjectId{1});
    write_pfm(tmp / "y" / kDepthFile, Raster<float>(16, 16, 1));
    EXPECT_THROW(read_view(tmp / "y"), ValidationError);
}

TEST(DatasetIo, WriteRejectsInvalidView) {
    TempDir tmp;
    GeneratedView g = small_view();
    g.view.depth.at(0, 0) = 1.0f;
    EXPECT_THROW(write_view(tmp / "v", g.view), ValidationError);
}

TEST(DatasetIo, ManifestRoundTripAndRegeneration) {
    TempDir a, b;
    const SceneConfig c = small_config();
    const DatasetManifest m = generate_dataset(c, a.path(), 3);
    generate_dataset(c, b.path(), 3);
    ASSERT_EQ(m.views.size(), 3u);
    for (const auto& entry : std::filesystem::recursive_directory_iterator(a.path())) {
        if (!entry.is_regular_file()) continue;
        const auto rel = std::filesystem::relative(entry.path(), a.path());
        EXPECT_EQ(slurp(entry.path()), slurp(b / rel.string())) << rel;
    }
    const DatasetManifest r = read_manifest(a.path());
    EXPECT_EQ(r.views.size(), 3u);
    EXPECT_EQ(r.stride, 4);
    EXPECT_EQ(r.target_id, 1);
    EXPECT_EQ(r.intrinsics.width, 32);
    EXPECT_EQ(r.grid.seed, c.grid.seed);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(r.views[k].dir, view_dir_name(k));
        EXPECT_EQ(r.views[k].grid_index, m.views[k].grid_index);
        EXPECT_EQ(r.views[k].sampled_pixels, m.views[k].sampled_pixels);
        const StoredView s = read_view(a.path() / r.views[k].dir);
        ASSERT_TRUE(s.labels);
        std::size_t labeled = 0;
        for (auto l : s.labels->data()) labeled += l != -1;
        EXPECT_EQ(labeled, r.views[k].sampled_pixels);
    }
    // writing the parsed manifest again is byte-identical
    write_manifest(b.path(), r);
    EXPECT_EQ(slurp(a / kManifestFile), slurp(b / kManifestFile));
    EXPECT_EQ(manifest_to_json(r), manifest_to_json(m));
}

TEST(DatasetIo, ManifestChecksReferencedFiles) {
    TempDir a;
    generate_dataset(small_config(), a.path(), 2);
    std::filesystem::remove(a / "view_0001" / kNormalsFile);
    EXPECT_THROW(read_manifest(a.path()), IoError);
    EXPECT_THROW(read_manifest(a / "nowhere"), IoError);
}

TEST(DatasetIo, GridIndexSelection) {
    EXPECT_EQ(select_grid_indices(1000, 4), (std::vector<std::size_t>{0, 250, 500, 750}));
    EXPECT_EQ(select_grid_indices(10, 10).back(), 9u);
    EXPECT_THROW(select_grid_indices(10, 0), ValidationError);
    EXPECT_THROW(select_grid_indices(10, 11), ValidationError);
}

#pragma once

#include "pixgrasp/raster.hpp"

#include <cstdint>
#include <filesystem>

namespace pixgrasp {

// PFM: "Pf" (1 channel) or "PF" (3 channels), scale -1.0 (little-endian
// float32). Rows are stored top-to-bottom so pixel (0, 0) is the top-left
// pixel in every format this project writes.
void write_pfm(const std::filesystem::path& path, const Raster<float>& image);
Raster<float> read_pfm(const std::filesystem::path& path);

// PNG through libpng. 8-bit gray (1 channel) or RGB (3 channels); 16-bit gray.
void write_png8(const std::filesystem::path& path, const Raster<std::uint8_t>& image);
void write_png16(const std::filesystem::path& path, const Raster<std::uint16_t>& image);
Raster<std::uint8_t> read_png8(const std::filesystem::path& path);
Raster<std::uint16_t> read_png16(const std::filesystem::path& path);

/// Reads any gray PNG (8 or 16 bit) and widens to 16 bit; used for masks.
Raster<std::uint16_t> read_png_gray_any(const std::filesystem::path& path);

}  // namespace pixgrasp

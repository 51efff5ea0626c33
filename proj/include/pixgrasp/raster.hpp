#pragma once

#include "pixgrasp/errors.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pixgrasp {

/// Row-major H x W x C image; (row 0, col 0) is the top-left pixel.
template <typename T>
class Raster {
public:
    Raster() = default;
    Raster(int width, int height, int channels = 1, T fill = T{})
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<std::size_t>(width) * height * channels, fill) {
        if (width < 0 || height < 0 || channels <= 0) throw ValidationError("raster: bad dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const { return data_.empty(); }

    T& at(int row, int col, int ch = 0) { return data_[index(row, col, ch)]; }
    const T& at(int row, int col, int ch = 0) const { return data_[index(row, col, ch)]; }

    std::span<T> data() { return data_; }
    std::span<const T> data() const { return data_; }

    bool same_shape(int width, int height) const { return width_ == width && height_ == height; }
    template <typename U>
    bool same_shape(const Raster<U>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    bool operator==(const Raster&) const = default;

private:
    std::size_t index(int row, int col, int ch) const {
        return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<T> data_;
};

}  // namespace pixgrasp

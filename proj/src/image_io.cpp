#include "pixgrasp/image_io.hpp"

#include <png.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace pixgrasp {

namespace {

static_assert(std::endian::native == std::endian::little, "PFM I/O assumes a little-endian host");

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string() + (mode[0] == 'r' ? " for reading" : " for writing"));
    return f;
}

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<std::uint8_t> bytes;  // raw rows; 16-bit samples in host order
};

void write_png_raw(const std::filesystem::path& path, const PngImage& img) {
    FilePtr f = open_file(path, "wb");
    std::string err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
    if (!png) throw IoError("libpng: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng: cannot create info struct");
    }
    const std::size_t row_bytes = static_cast<std::size_t>(img.width) * img.channels * (img.bit_depth / 8);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("writing " + path.string() + ": " + err);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, img.width, img.height, img.bit_depth,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    if (img.bit_depth == 16) png_set_swap(png);
    for (int r = 0; r < img.height; ++r) {
        png_write_row(png, img.bytes.data() + r * row_bytes);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(f.get()) != 0) throw IoError("writing " + path.string() + ": flush failed");
}

PngImage read_png_raw(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    std::uint8_t sig[8];
    if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw ValidationError(path.string() + ": not a PNG file");
    }
    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
    if (!png) throw IoError("libpng: cannot create read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng: cannot create info struct");
    }
    PngImage img;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ValidationError(path.string() + ": malformed PNG: " + err);
    }
    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.bit_depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_GRAY) {
        img.channels = 1;
    } else if (color == PNG_COLOR_TYPE_RGB) {
        img.channels = 3;
    } else {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ValidationError(path.string() + ": unsupported PNG color type");
    }
    if (img.bit_depth != 8 && img.bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ValidationError(path.string() + ": unsupported PNG bit depth");
    }
    if (img.bit_depth == 16) png_set_swap(png);
    png_read_update_info(png, info);
    const std::size_t row_bytes = png_get_rowbytes(png, info);
    img.bytes.resize(row_bytes * img.height);
    for (int r = 0; r < img.height; ++r) png_read_row(png, img.bytes.data() + r * row_bytes, nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const Raster<float>& image) {
    if (image.channels() != 1 && image.channels() != 3) throw ValidationError("PFM supports 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << (image.channels() == 3 ? "PF" : "Pf") << '\n'
        << image.width() << ' ' << image.height() << '\n'
        << "-1.0\n";
    const auto data = image.data();
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
    if (!out) throw IoError("writing " + path.string() + " failed");
}

Raster<float> read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    auto malformed = [&](const std::string& why) {
        return ValidationError(path.string() + ": malformed PFM header (" + why + ")");
    };
    std::string magic;
    int width = 0, height = 0;
    std::string scale_token;
    if (!(in >> magic)) throw malformed("missing magic");
    if (magic != "PF" && magic != "Pf") throw malformed("bad magic '" + magic + "'");
    if (!(in >> width >> height) || width <= 0 || height <= 0) throw malformed("bad dimensions");
    if (!(in >> scale_token)) throw malformed("missing scale");
    double scale = 0.0;
    try {
        scale = std::stod(scale_token);
    } catch (const std::exception&) {
        throw malformed("bad scale");
    }
    if (!(scale < 0.0)) throw malformed("big-endian PFM is not supported");
    if (in.get() != '\n') throw malformed("missing newline after scale");

    Raster<float> image(width, height, magic == "PF" ? 3 : 1);
    auto data = image.data();
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
    if (in.gcount() != static_cast<std::streamsize>(data.size_bytes())) {
        throw ValidationError(path.string() + ": truncated PFM payload");
    }
    return image;
}

void write_png8(const std::filesystem::path& path, const Raster<std::uint8_t>& image) {
    if (image.channels() != 1 && image.channels() != 3) throw ValidationError("PNG8 supports 1 or 3 channels");
    PngImage img{image.width(), image.height(), image.channels(), 8, {}};
    img.bytes.assign(image.data().begin(), image.data().end());
    write_png_raw(path, img);
}

void write_png16(const std::filesystem::path& path, const Raster<std::uint16_t>& image) {
    if (image.channels() != 1) throw ValidationError("PNG16 supports 1 channel");
    PngImage img{image.width(), image.height(), 1, 16, {}};
    img.bytes.resize(image.data().size_bytes());
    std::memcpy(img.bytes.data(), image.data().data(), img.bytes.size());
    write_png_raw(path, img);
}

Raster<std::uint8_t> read_png8(const std::filesystem::path& path) {
    const PngImage img = read_png_raw(path);
    if (img.bit_depth != 8) throw ValidationError(path.string() + ": expected an 8-bit PNG");
    Raster<std::uint8_t> out(img.width, img.height, img.channels);
    std::memcpy(out.data().data(), img.bytes.data(), out.data().size_bytes());
    return out;
}

Raster<std::uint16_t> read_png16(const std::filesystem::path& path) {
    const PngImage img = read_png_raw(path);
    if (img.bit_depth != 16 || img.channels != 1) throw ValidationError(path.string() + ": expected a 16-bit gray PNG");
    Raster<std::uint16_t> out(img.width, img.height, 1);
    std::memcpy(out.data().data(), img.bytes.data(), out.data().size_bytes());
    return out;
}

Raster<std::uint16_t> read_png_gray_any(const std::filesystem::path& path) {
    const PngImage img = read_png_raw(path);
    if (img.channels != 1) throw ValidationError(path.string() + ": expected a gray PNG");
    if (img.bit_depth == 16) {
        Raster<std::uint16_t> out(img.width, img.height, 1);
        std::memcpy(out.data().data(), img.bytes.data(), out.data().size_bytes());
        return out;
    }
    Raster<std::uint16_t> out(img.width, img.height, 1);
    for (std::size_t i = 0; i < img.bytes.size(); ++i) out.data()[i] = img.bytes[i];
    return out;
}

}  // namespace pixgrasp

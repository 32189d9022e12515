#include "marlow/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace marlow {

namespace {

namespace fs = std::filesystem;

struct RawRaster {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> bytes;
};

std::string lower_ext(const fs::path& p) {
    auto ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw Error("cannot open '" + path.string() + "'");
    return f;
}

void png_error_handler(png_structp png, png_const_charp msg) {
    auto* buf = static_cast<std::string*>(png_get_error_ptr(png));
    if (buf) *buf = msg;
    png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

// libpng reports errors by longjmp; these helpers own the setjmp frames and keep
// only trivially destructible locals so no C++ object is skipped on unwind.
bool png_decode_header(png_structp png, png_infop info, std::FILE* file) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_init_io(png, file);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    return true;
}

bool png_decode_rows(png_structp png, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    return true;
}

bool png_encode(png_structp png, png_infop info, std::FILE* file, int width, int height, int color_type,
                png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_init_io(png, file);
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    return true;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

RawRaster read_png(const fs::path& path) {
    auto file = open_file(path, "rb");
    std::uint8_t sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw Error("'" + path.string() + "' is not a PNG file");
    }
    std::string err;
    PngReader reader;
    reader.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
    if (!reader.png) throw Error("libpng: out of memory");
    reader.info = png_create_info_struct(reader.png);
    if (!reader.info) throw Error("libpng: out of memory");
    if (!png_decode_header(reader.png, reader.info, file.get())) {
        throw Error("failed to decode '" + path.string() + "': " + err);
    }

    RawRaster raster;
    const auto bit_depth = png_get_bit_depth(reader.png, reader.info);
    const auto color_type = png_get_color_type(reader.png, reader.info);
    if (bit_depth != 8) {
        throw Error("'" + path.string() + "': unsupported bit depth " + std::to_string(bit_depth) +
                    " (only 8-bit is supported)");
    }
    if (color_type == PNG_COLOR_TYPE_GRAY) {
        raster.channels = 1;
    } else if (color_type == PNG_COLOR_TYPE_RGB) {
        raster.channels = 3;
    } else {
        throw Error("'" + path.string() + "': unsupported color type " + std::to_string(color_type) +
                    " (only 8-bit gray or RGB is supported)");
    }
    raster.width = static_cast<int>(png_get_image_width(reader.png, reader.info));
    raster.height = static_cast<int>(png_get_image_height(reader.png, reader.info));
    const std::size_t stride = static_cast<std::size_t>(raster.width) * raster.channels;
    raster.bytes.resize(stride * raster.height);
    std::vector<png_bytep> rows(raster.height);
    for (int r = 0; r < raster.height; ++r) rows[r] = raster.bytes.data() + stride * r;
    if (!png_decode_rows(reader.png, rows.data())) {
        throw Error("failed to decode '" + path.string() + "': " + err);
    }
    return raster;
}

void write_png(const RawRaster& raster, const fs::path& path) {
    auto file = open_file(path, "wb");
    std::string err;
    PngWriter writer;
    writer.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler, png_warning_handler);
    if (!writer.png) throw Error("libpng: out of memory");
    writer.info = png_create_info_struct(writer.png);
    if (!writer.info) throw Error("libpng: out of memory");
    const std::size_t stride = static_cast<std::size_t>(raster.width) * raster.channels;
    std::vector<png_bytep> rows(raster.height);
    for (int r = 0; r < raster.height; ++r) {
        rows[r] = const_cast<png_bytep>(raster.bytes.data() + stride * r);
    }
    const int color_type = raster.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    if (!png_encode(writer.png, writer.info, file.get(), raster.width, raster.height, color_type, rows.data())) {
        throw Error("failed to encode '" + path.string() + "': " + err);
    }
    if (std::fflush(file.get()) != 0) throw Error("write failed for '" + path.string() + "'");
}

// Reads one whitespace-delimited header token, skipping '#' comments.
int read_pnm_int(std::istream& in, const fs::path& path) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = -1;
    if (!(in >> value) || value < 0) throw Error("malformed PNM header in '" + path.string() + "'");
    return value;
}

RawRaster read_pnm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    char magic[2] = {};
    in.read(magic, 2);
    RawRaster raster;
    if (magic[0] == 'P' && magic[1] == '5') {
        raster.channels = 1;
    } else if (magic[0] == 'P' && magic[1] == '6') {
        raster.channels = 3;
    } else {
        throw Error("'" + path.string() + "' is not a binary PGM/PPM file");
    }
    raster.width = read_pnm_int(in, path);
    raster.height = read_pnm_int(in, path);
    const int maxval = read_pnm_int(in, path);
    if (maxval != 255) {
        throw Error("'" + path.string() + "': unsupported maxval " + std::to_string(maxval) + " (only 255)");
    }
    in.get();  // single whitespace before the raster
    raster.bytes.resize(static_cast<std::size_t>(raster.width) * raster.height * raster.channels);
    in.read(reinterpret_cast<char*>(raster.bytes.data()), static_cast<std::streamsize>(raster.bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.bytes.size())) {
        throw Error("'" + path.string() + "': truncated raster");
    }
    return raster;
}

void write_pnm(const RawRaster& raster, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << (raster.channels == 1 ? "P5" : "P6") << '\n' << raster.width << ' ' << raster.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(raster.bytes.data()), static_cast<std::streamsize>(raster.bytes.size()));
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

RawRaster read_raster(const fs::path& path) {
    if (!fs::exists(path)) throw Error("file not found: '" + path.string() + "'");
    const auto ext = lower_ext(path);
    if (ext == ".png") return read_png(path);
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
    throw Error("unsupported image format '" + ext + "' for '" + path.string() + "'");
}

void write_raster(const RawRaster& raster, const fs::path& path) {
    const auto ext = lower_ext(path);
    if (ext == ".png") {
        write_png(raster, path);
    } else if (ext == ".pgm" || ext == ".pnm") {
        if (raster.channels != 1) throw Error("cannot store a color image as PGM: '" + path.string() + "'");
        write_pnm(raster, path);
    } else if (ext == ".ppm") {
        if (raster.channels != 3) throw Error("cannot store a grayscale image as PPM: '" + path.string() + "'");
        write_pnm(raster, path);
    } else {
        throw Error("unsupported image format '" + ext + "' for '" + path.string() + "'");
    }
}

}  // namespace

std::uint8_t quantize(double sample) noexcept {
    const double v = std::floor(sample * 255.0 + 0.5);
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

Image load_image(const fs::path& path) {
    const auto raster = read_raster(path);
    std::vector<double> data(raster.bytes.size());
    std::transform(raster.bytes.begin(), raster.bytes.end(), data.begin(),
                   [](std::uint8_t b) { return b / 255.0; });
    return Image(raster.width, raster.height, raster.channels, std::move(data));
}

void save_image(const Image& img, const fs::path& path) {
    if (img.empty()) throw Error("save_image: empty image");
    RawRaster raster{img.width(), img.height(), img.channels(), {}};
    raster.bytes.resize(img.size());
    std::transform(img.data().begin(), img.data().end(), raster.bytes.begin(), quantize);
    write_raster(raster, path);
}

Mask load_mask(const fs::path& path) {
    const auto raster = read_raster(path);
    if (raster.channels != 1) throw Error("mask '" + path.string() + "' must be grayscale");
    return Mask(raster.width, raster.height, raster.bytes);
}

void save_mask(const Mask& mask, const fs::path& path) {
    RawRaster raster{mask.width(), mask.height(), 1, {}};
    raster.bytes.resize(mask.pixel_count());
    std::transform(mask.raw().begin(), mask.raw().end(), raster.bytes.begin(),
                   [](std::uint8_t k) { return static_cast<std::uint8_t>(k ? 255 : 0); });
    write_raster(raster, path);
}

}  // namespace marlow

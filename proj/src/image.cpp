#include "voxcast/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "voxcast/error.hpp"

namespace voxcast {

namespace {

bool host_is_little_endian() {
    const std::uint16_t v = 1;
    return *reinterpret_cast<const std::uint8_t*>(&v) == 1;
}

std::uint8_t to_u8(float v) {
    const float c = std::clamp(v, 0.f, 1.f);
    return static_cast<std::uint8_t>(std::lround(c * 255.f));
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_pfm(const std::string& path, const Image3f& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for write: " + path);
    // scale -1.0 declares little-endian payload
    out << "PF\n" << img.width << " " << img.height << "\n-1.0\n";
    // PFM stores the bottom row first
    for (int y = img.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(img.at(0, y)),
                  static_cast<std::streamsize>(img.width) * 3 * sizeof(float));
    if (!out) throw IoError("short write: " + path);
}

Image3f read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string magic;
    int w = 0, h = 0;
    double scale = 0.0;
    in >> magic >> w >> h >> scale;
    if (magic != "PF" || w <= 0 || h <= 0 || scale == 0.0)
        throw FormatError("not a color PFM: " + path);
    in.get();  // single whitespace after the header
    Image3f img(w, h);
    for (int y = h - 1; y >= 0; --y)
        in.read(reinterpret_cast<char*>(img.at(0, y)),
                static_cast<std::streamsize>(w) * 3 * sizeof(float));
    if (!in) throw FormatError("truncated PFM: " + path);
    if ((scale < 0.0) != host_is_little_endian())
        for (auto& f : img.pixels) {
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            u = __builtin_bswap32(u);
            std::memcpy(&f, &u, 4);
        }
    return img;
}

namespace {

void write_png_impl(const std::string& path, int w, int h, int channels,
                    const std::vector<std::uint8_t>& bytes) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for write: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, w, h, 8,
                 channels == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
        rows[y] = const_cast<png_bytep>(&bytes[static_cast<size_t>(y) * w * channels]);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png(const std::string& path, const Image3f& img) {
    std::vector<std::uint8_t> bytes(static_cast<size_t>(img.width) * img.height * 3);
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_u8(img.pixels[i]);
    write_png_impl(path, img.width, img.height, 3, bytes);
}

void write_png_rgba(const std::string& path, const Image4f& img) {
    std::vector<std::uint8_t> bytes(static_cast<size_t>(img.width) * img.height * 4);
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_u8(img.pixels[i]);
    write_png_impl(path, img.width, img.height, 4, bytes);
}

RasterSlice read_png_slice(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open: " + path);
    png_byte header[8] = {};
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw FormatError("not a PNG: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("libpng read failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    png_set_strip_alpha(png);
    if (host_is_little_endian()) png_set_swap(png);  // 16-bit PNG is big-endian on disk
    png_read_update_info(png, info);

    RasterSlice s;
    s.width = static_cast<int>(png_get_image_width(png, info));
    s.height = static_cast<int>(png_get_image_height(png, info));
    s.bits = png_get_bit_depth(png, info);
    s.channels = png_get_channels(png, info);
    if (s.channels != 1 && s.channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG channel count in " + path);
    }
    s.samples.resize(static_cast<size_t>(s.width) * s.height * s.channels);
    std::vector<std::uint8_t> row(png_get_rowbytes(png, info));
    for (int y = 0; y < s.height; ++y) {
        png_read_row(png, row.data(), nullptr);
        std::uint16_t* dst = &s.samples[static_cast<size_t>(y) * s.width * s.channels];
        const size_t n = static_cast<size_t>(s.width) * s.channels;
        if (s.bits == 16) {
            std::memcpy(dst, row.data(), n * 2);
        } else {
            for (size_t i = 0; i < n; ++i) dst[i] = row[i];
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return s;
}

RasterSlice read_pnm_slice(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P6") throw FormatError("not a binary PGM/PPM: " + path);
    auto next_int = [&in, &path]() {
        // skip whitespace and '#' comment lines
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
        long v = -1;
        in >> v;
        if (!in || v < 0) throw FormatError("bad PNM header: " + path);
        return v;
    };
    RasterSlice s;
    s.width = static_cast<int>(next_int());
    s.height = static_cast<int>(next_int());
    const long maxval = next_int();
    in.get();  // single whitespace before payload
    s.channels = (magic == "P6") ? 3 : 1;
    s.bits = maxval > 255 ? 16 : 8;
    const size_t n = static_cast<size_t>(s.width) * s.height * s.channels;
    s.samples.resize(n);
    if (s.bits == 8) {
        std::vector<std::uint8_t> raw(n);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
        if (!in) throw FormatError("truncated PNM: " + path);
        for (size_t i = 0; i < n; ++i) s.samples[i] = raw[i];
    } else {
        std::vector<std::uint8_t> raw(n * 2);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n * 2));
        if (!in) throw FormatError("truncated PNM: " + path);
        for (size_t i = 0; i < n; ++i)  // big-endian per spec
            s.samples[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
    return s;
}

RasterSlice read_slice_any(const std::string& path) {
    const auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == "png") return read_png_slice(path);
    if (ext == "pgm" || ext == "ppm" || ext == "pnm") return read_pnm_slice(path);
    throw FormatError("unsupported slice format: " + path);
}

void write_pgm(const std::string& path, const RasterSlice& slice) {
    if (slice.channels != 1 && slice.channels != 3)
        throw FormatError("unsupported channel count for PNM write");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for write: " + path);
    out << (slice.channels == 3 ? "P6" : "P5") << "\n"
        << slice.width << " " << slice.height << "\n"
        << (slice.bits > 8 ? 65535 : 255) << "\n";
    const size_t n = slice.samples.size();
    if (slice.bits > 8) {
        std::vector<std::uint8_t> raw(n * 2);
        for (size_t i = 0; i < n; ++i) {
            raw[2 * i] = static_cast<std::uint8_t>(slice.samples[i] >> 8);
            raw[2 * i + 1] = static_cast<std::uint8_t>(slice.samples[i] & 0xff);
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    } else {
        std::vector<std::uint8_t> raw(n);
        for (size_t i = 0; i < n; ++i) raw[i] = static_cast<std::uint8_t>(slice.samples[i]);
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    }
    if (!out) throw IoError("short write: " + path);
}

double psnr(const Image3f& a, const Image3f& b) {
    if (a.width != b.width || a.height != b.height) throw Error("psnr: size mismatch");
    double mse = 0.0;
    const size_t n = a.pixels.size();
    for (size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
        mse += d * d;
    }
    mse /= static_cast<double>(n);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double max_abs_diff(const Image3f& a, const Image3f& b) {
    if (a.width != b.width || a.height != b.height) throw Error("diff: size mismatch");
    double m = 0.0;
    for (size_t i = 0; i < a.pixels.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a.pixels[i]) - b.pixels[i]));
    return m;
}

}  // namespace voxcast

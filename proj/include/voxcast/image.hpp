#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace voxcast {

/// RGB float image, row-major, top row first.
struct Image3f {
    int width = 0, height = 0;
    std::vector<float> pixels;  // 3 floats per pixel

    Image3f() = default;
    Image3f(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3, 0.f) {}

    float* at(int x, int y) { return &pixels[(static_cast<size_t>(y) * width + x) * 3]; }
    const float* at(int x, int y) const {
        return &pixels[(static_cast<size_t>(y) * width + x) * 3];
    }
};

/// RGBA float image; RGB is premultiplied by alpha throughout the
/// pipeline so emission-only (alpha 0) and emission-absorption layers
/// composite with the same operator.
struct Image4f {
    int width = 0, height = 0;
    std::vector<float> pixels;  // 4 floats per pixel

    Image4f() = default;
    Image4f(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h * 4, 0.f) {}

    float* at(int x, int y) { return &pixels[(static_cast<size_t>(y) * width + x) * 4]; }
    const float* at(int x, int y) const {
        return &pixels[(static_cast<size_t>(y) * width + x) * 4];
    }
};

/// Per-pixel Euclidean distance from the camera to the nearest
/// fragment, in world units. Infinity where nothing was drawn.
struct DepthDistanceBuffer {
    int width = 0, height = 0;
    std::vector<double> dist;

    DepthDistanceBuffer() = default;
    DepthDistanceBuffer(int w, int h)
        : width(w), height(h),
          dist(static_cast<size_t>(w) * h, std::numeric_limits<double>::infinity()) {}

    double& at(int x, int y) { return dist[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return dist[static_cast<size_t>(y) * width + x]; }
};

/// 8/16-bit raster slice as read from a PNG/PGM/PPM file.
struct RasterSlice {
    int width = 0, height = 0;
    int channels = 1;      // 1 or 3
    int bits = 8;          // 8 or 16
    std::vector<std::uint16_t> samples;  // channel-interleaved, one entry per sample
};

// --- float image I/O -------------------------------------------------

/// PFM ("PF", little-endian, bottom row first on disk). The canonical
/// artifact for image comparisons; writes are bit-stable.
void write_pfm(const std::string& path, const Image3f& img);
Image3f read_pfm(const std::string& path);

// 8-bit PNG for humans. Values are clamped to [0,1] and scaled.
void write_png(const std::string& path, const Image3f& img);
void write_png_rgba(const std::string& path, const Image4f& img);

RasterSlice read_slice_any(const std::string& path);  // dispatch by extension
RasterSlice read_png_slice(const std::string& path);
RasterSlice read_pnm_slice(const std::string& path);  // P5 / P6, maxval 255 or 65535
void write_pgm(const std::string& path, const RasterSlice& slice);

// --- comparisons ------------------------------------------------------

double psnr(const Image3f& a, const Image3f& b);
double max_abs_diff(const Image3f& a, const Image3f& b);

inline Image3f strip_alpha(const Image4f& img) {
    Image3f out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const float* s = img.at(x, y);
            float* d = out.at(x, y);
            d[0] = s[0];
            d[1] = s[1];
            d[2] = s[2];
        }
    return out;
}

}  // namespace voxcast

#pragma once

#include <array>
#include <string>

#include "voxcast/geometry.hpp"

namespace voxcast {

enum class TfVariant { linear, palette, depth_palette, gradient_modulated };

using Palette = std::array<std::array<float, 3>, 256>;

/// Maps normalized voxel values (or the gradient magnitude, or ray
/// depth) to emitted intensity and opacity density. Both maps are
/// total on [0,1] and produce finite, nonnegative outputs.
struct TransferFunction {
    TfVariant variant = TfVariant::linear;
    double scale = 1.0;
    double offset = 0.0;
    double opacity_scale = 0.0;  // 0 makes emission-absorption degenerate to emission
    Palette palette{};
    bool has_palette = false;
    // emission weights per source channel (multi-channel data renders
    // as the weighted sum of its channels)
    std::array<Vec3, 4> channel_colors{Vec3{1, 1, 1}, Vec3{1, 1, 1}, Vec3{1, 1, 1},
                                       Vec3{1, 1, 1}};

    bool needs_gradient() const { return variant == TfVariant::gradient_modulated; }
    bool needs_depth() const { return variant == TfVariant::depth_palette; }

    /// values: normalized channel samples; depth_frac: position of the
    /// sample along the ray's chord through the volume in [0,1].
    void shade(const float* values, int channels, double grad_mag, double depth_frac,
               Vec3& emission, double& rho) const;

    static TransferFunction linear(double scale, double offset, double opacity_scale);

    /// Default per-channel colors: white for single channel, a fixed
    /// distinguishable set for 2..4 channels.
    static std::array<Vec3, 4> default_channel_colors(int channels);
};

/// 256 x 3 CSV (values in [0,1] or [0,255], one row per entry).
Palette load_palette_csv(const std::string& path);
Palette grayscale_palette();
Palette viridis_like_palette();  // built-in fallback so configs can omit the CSV

}  // namespace voxcast

#include "voxcast/transfer_function.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "voxcast/error.hpp"

namespace voxcast {

namespace {

int palette_index(double u) { return std::clamp(static_cast<int>(u * 255.0 + 0.5), 0, 255); }

}  // namespace

void TransferFunction::shade(const float* values, int channels, double grad_mag,
                             double depth_frac, Vec3& emission, double& rho) const {
    switch (variant) {
        case TfVariant::linear: {
            emission = {0, 0, 0};
            double smax = 0.0;
            for (int c = 0; c < channels; ++c) {
                const double s = std::max(0.0, scale * values[c] + offset);
                emission += channel_colors[c] * s;
                smax = std::max(smax, s);
            }
            rho = opacity_scale * smax;
            return;
        }
        case TfVariant::palette: {
            const double u = values[0];
            const auto& e = palette[palette_index(u)];
            emission = Vec3{e[0], e[1], e[2]} * (scale * u);
            rho = opacity_scale * u;
            return;
        }
        case TfVariant::depth_palette: {
            const double u = values[0];
            const auto& e = palette[palette_index(depth_frac)];
            emission = Vec3{e[0], e[1], e[2]} * (scale * u);
            rho = opacity_scale * u;
            return;
        }
        case TfVariant::gradient_modulated: {
            const double g = std::clamp(scale * grad_mag + offset, 0.0, 1.0);
            const auto& e = palette[palette_index(g)];
            emission = Vec3{e[0], e[1], e[2]} * g;
            rho = opacity_scale * g;
            return;
        }
    }
    emission = {0, 0, 0};
    rho = 0.0;
}

TransferFunction TransferFunction::linear(double scale, double offset, double opacity_scale) {
    TransferFunction tf;
    tf.variant = TfVariant::linear;
    tf.scale = scale;
    tf.offset = offset;
    tf.opacity_scale = opacity_scale;
    return tf;
}

std::array<Vec3, 4> TransferFunction::default_channel_colors(int channels) {
    if (channels <= 1) return {Vec3{1, 1, 1}, Vec3{1, 1, 1}, Vec3{1, 1, 1}, Vec3{1, 1, 1}};
    return {Vec3{0.66, 0.30, 0.96}, Vec3{0.30, 0.96, 0.40}, Vec3{0.95, 0.60, 0.20},
            Vec3{0.40, 0.60, 1.00}};
}

Palette load_palette_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open palette: " + path);
    Palette p{};
    std::string line;
    int row = 0;
    double maxval = 0.0;
    std::vector<std::array<double, 3>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::array<double, 3> rgb{};
        if (!(ss >> rgb[0] >> rgb[1] >> rgb[2]))
            throw FormatError("palette row " + std::to_string(row + 1) + " malformed: " + path);
        maxval = std::max({maxval, rgb[0], rgb[1], rgb[2]});
        rows.push_back(rgb);
        ++row;
    }
    if (rows.size() != 256)
        throw FormatError("palette must have 256 rows, got " + std::to_string(rows.size()) +
                          ": " + path);
    const double norm = maxval > 1.5 ? 1.0 / 255.0 : 1.0;  // accept 0..255 or 0..1
    for (int i = 0; i < 256; ++i)
        for (int c = 0; c < 3; ++c) p[i][c] = static_cast<float>(rows[i][c] * norm);
    return p;
}

Palette grayscale_palette() {
    Palette p{};
    for (int i = 0; i < 256; ++i) {
        const float v = static_cast<float>(i) / 255.f;
        p[i] = {v, v, v};
    }
    return p;
}

Palette viridis_like_palette() {
    // coarse 5-stop gradient, linearly interpolated
    static const float stops[5][3] = {{0.267f, 0.005f, 0.329f},
                                      {0.229f, 0.322f, 0.546f},
                                      {0.127f, 0.566f, 0.551f},
                                      {0.369f, 0.789f, 0.383f},
                                      {0.993f, 0.906f, 0.144f}};
    Palette p{};
    for (int i = 0; i < 256; ++i) {
        const double t = i / 255.0 * 4.0;
        const int s = std::min(3, static_cast<int>(t));
        const double f = t - s;
        for (int c = 0; c < 3; ++c)
            p[i][c] = static_cast<float>(stops[s][c] * (1.0 - f) + stops[s + 1][c] * f);
    }
    return p;
}

}  // namespace voxcast

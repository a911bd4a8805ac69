#include "voxcast/synthetic.hpp"

#include <cmath>
#include <random>

namespace voxcast {

Volume synth_blob_volume(std::array<std::uint32_t, 3> dims, std::uint32_t seed,
                         int blob_count) {
    Volume v = Volume::zeros(dims, 1, 8);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> pos(0.15, 0.85);
    std::uniform_real_distribution<double> sigma(0.04, 0.14);
    std::uniform_real_distribution<double> amp(0.4, 1.0);
    struct Blob {
        double cx, cy, cz, inv2s2, a;
    };
    std::vector<Blob> blobs(blob_count);
    for (auto& b : blobs) {
        b.cx = pos(rng);
        b.cy = pos(rng);
        b.cz = pos(rng);
        const double s = sigma(rng);
        b.inv2s2 = 1.0 / (2.0 * s * s);
        b.a = amp(rng);
    }
    for (std::uint32_t z = 0; z < dims[2]; ++z)
        for (std::uint32_t y = 0; y < dims[1]; ++y)
            for (std::uint32_t x = 0; x < dims[0]; ++x) {
                const double px = (x + 0.5) / dims[0];
                const double py = (y + 0.5) / dims[1];
                const double pz = (z + 0.5) / dims[2];
                double f = 0.0;
                for (const Blob& b : blobs) {
                    const double dx = px - b.cx, dy = py - b.cy, dz = pz - b.cz;
                    f += b.a * std::exp(-(dx * dx + dy * dy + dz * dz) * b.inv2s2);
                }
                v.set_value(x, y, z, 0,
                            static_cast<std::uint32_t>(std::min(255.0, f * 255.0)));
            }
    return v;
}

Volume synth_noise_volume(std::array<std::uint32_t, 3> dims, std::uint32_t seed) {
    Volume v = Volume::zeros(dims, 1, 8);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& b : v.data) b = static_cast<std::uint8_t>(byte(rng));
    return v;
}

}  // namespace voxcast

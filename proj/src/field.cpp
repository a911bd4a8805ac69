#include "voxcast/field.hpp"

#include <cmath>

#include "voxcast/error.hpp"

namespace voxcast {

Vec3 field_gradient(const FieldSampler& field, const Vec3& p) {
    const Vec3 h = field.spacing();
    float va[kMaxChannels], vb[kMaxChannels];
    const int nc = field.channels();
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
        Vec3 pa = p, pb = p;
        pa[a] += h[a];
        pb[a] -= h[a];
        field.sample(pa, va);
        field.sample(pb, vb);
        double ma = 0, mb = 0;
        for (int c = 0; c < nc; ++c) {
            ma += va[c];
            mb += vb[c];
        }
        g[a] = (ma - mb) / (nc * 2.0 * h[a]);
    }
    return g;
}

// --- TrilinearField ----------------------------------------------------

TrilinearField::TrilinearField(const Volume& volume, Vec3 spacing)
    : volume_(volume), spacing_(spacing) {
    bounds_ = AABB{Vec3{0, 0, 0}, Vec3{volume.dims[0] * spacing.x, volume.dims[1] * spacing.y,
                                       volume.dims[2] * spacing.z}};
    norm_ = volume.bits_per_channel == 8 ? 1.0 / 255.0 : 1.0 / 65535.0;
}

void TrilinearField::sample(const Vec3& p, float* out) const {
    const int nc = volume_.channels;
    if (!bounds_.contains(p)) {
        for (int c = 0; c < nc; ++c) out[c] = 0.f;
        return;
    }
    double fx[3];
    std::int64_t i0[3];
    for (int a = 0; a < 3; ++a) {
        const double g = p[a] / spacing_[a] - 0.5;
        const double fl = std::floor(g);
        i0[a] = static_cast<std::int64_t>(fl);
        fx[a] = g - fl;
    }
    auto clamp_idx = [&](std::int64_t i, int a) {
        return static_cast<std::uint32_t>(
            std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(volume_.dims[a]) - 1));
    };
    for (int c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (int corner = 0; corner < 8; ++corner) {
            const double w = ((corner & 1) ? fx[0] : 1.0 - fx[0]) *
                             ((corner & 2) ? fx[1] : 1.0 - fx[1]) *
                             ((corner & 4) ? fx[2] : 1.0 - fx[2]);
            acc += w * volume_.value_at(clamp_idx(i0[0] + ((corner >> 0) & 1), 0),
                                        clamp_idx(i0[1] + ((corner >> 1) & 1), 1),
                                        clamp_idx(i0[2] + ((corner >> 2) & 1), 2), c);
        }
        out[c] = static_cast<float>(acc * norm_);
    }
}

// --- CachedLevelField ---------------------------------------------------

CachedLevelField::CachedLevelField(const VolumeMeta& meta, const CacheKey& center,
                                   const BlockCache& cache)
    : meta_(meta), center_(center) {
    const double scale = static_cast<double>(1u << center.level);
    spacing_ = Vec3{meta.voxel_spacing[0] * scale, meta.voxel_spacing[1] * scale,
                    meta.voxel_spacing[2] * scale};
    bounds_ = meta.world_bounds();
    level_dims_ = meta.level_dims(center.level);
    norm_ = meta.bits_per_channel == 8 ? 1.0 / 255.0 : 1.0 / 65535.0;

    const auto grid = meta.level_grid(center.level);
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const std::int64_t bi = static_cast<std::int64_t>(center.coords[0]) + dx;
                const std::int64_t bj = static_cast<std::int64_t>(center.coords[1]) + dy;
                const std::int64_t bk = static_cast<std::int64_t>(center.coords[2]) + dz;
                if (bi < 0 || bj < 0 || bk < 0 || bi >= grid[0] || bj >= grid[1] ||
                    bk >= grid[2])
                    continue;
                const CacheKey key{center.level,
                                   {static_cast<std::uint32_t>(bi),
                                    static_cast<std::uint32_t>(bj),
                                    static_cast<std::uint32_t>(bk)}};
                hood_[(dz + 1) * 9 + (dy + 1) * 3 + (dx + 1)] = cache.peek(key);
            }
}

const std::uint8_t* CachedLevelField::voxel_ptr(std::int64_t vx, std::int64_t vy,
                                                std::int64_t vz) const {
    const std::int64_t bs = meta_.block_size;
    const std::int64_t bi = vx / bs, bj = vy / bs, bk = vz / bs;
    const std::int64_t dx = bi - center_.coords[0], dy = bj - center_.coords[1],
                       dz = bk - center_.coords[2];
    if (dx < -1 || dx > 1 || dy < -1 || dy > 1 || dz < -1 || dz > 1) return nullptr;
    const auto& block = hood_[(dz + 1) * 9 + (dy + 1) * 3 + (dx + 1)];
    if (!block) return nullptr;
    const std::int64_t lx = vx - bi * bs, ly = vy - bj * bs, lz = vz - bk * bs;
    const std::size_t idx =
        ((static_cast<std::size_t>(lz) * bs + ly) * bs + lx) * meta_.channels *
        meta_.bytes_per_channel();
    return &block->voxels[idx];
}

void CachedLevelField::sample(const Vec3& p, float* out) const {
    const int nc = meta_.channels;
    if (!bounds_.contains(p)) {
        for (int c = 0; c < nc; ++c) out[c] = 0.f;
        return;
    }
    double fx[3];
    std::int64_t i0[3];
    for (int a = 0; a < 3; ++a) {
        const double g = p[a] / spacing_[a] - 0.5;
        const double fl = std::floor(g);
        i0[a] = static_cast<std::int64_t>(fl);
        fx[a] = g - fl;
    }
    double acc[kMaxChannels] = {0, 0, 0, 0};
    for (int corner = 0; corner < 8; ++corner) {
        const double w = ((corner & 1) ? fx[0] : 1.0 - fx[0]) *
                         ((corner & 2) ? fx[1] : 1.0 - fx[1]) *
                         ((corner & 4) ? fx[2] : 1.0 - fx[2]);
        std::int64_t v[3];
        for (int a = 0; a < 3; ++a)
            v[a] = std::clamp<std::int64_t>(i0[a] + ((corner >> a) & 1), 0,
                                            static_cast<std::int64_t>(level_dims_[a]) - 1);
        if (const std::uint8_t* ptr = voxel_ptr(v[0], v[1], v[2])) {
            if (meta_.bits_per_channel == 8) {
                for (int c = 0; c < nc; ++c) acc[c] += w * ptr[c];
            } else {
                for (int c = 0; c < nc; ++c)
                    acc[c] += w * (ptr[2 * c] | (ptr[2 * c + 1] << 8));
            }
        }
    }
    for (int c = 0; c < nc; ++c) out[c] = static_cast<float>(acc[c] * norm_);
}

}  // namespace voxcast

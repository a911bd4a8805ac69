#pragma once

#include <array>
#include <functional>
#include <memory>

#include "voxcast/block_cache.hpp"
#include "voxcast/container.hpp"
#include "voxcast/geometry.hpp"

namespace voxcast {

constexpr int kMaxChannels = 4;

/// A sampling domain in world coordinates. Samples are normalized to
/// [0,1] per channel; points outside bounds() sample to 0. Inside,
/// values are the trilinear blend of the 8 enclosing voxels, with
/// indices clamped to the volume edge.
class FieldSampler {
  public:
    virtual ~FieldSampler() = default;
    virtual int channels() const = 0;
    virtual AABB bounds() const = 0;
    virtual void sample(const Vec3& p, float* out) const = 0;
    /// Voxel pitch used for gradient stencils and step-size defaults.
    virtual Vec3 spacing() const = 0;
};

/// Central-difference gradient of the channel mean, h = one voxel
/// spacing per axis.
Vec3 field_gradient(const FieldSampler& field, const Vec3& p);

/// Dense in-memory volume with voxel centers at (i + 1/2) * spacing.
class TrilinearField final : public FieldSampler {
  public:
    TrilinearField(const Volume& volume, Vec3 spacing);

    int channels() const override { return volume_.channels; }
    AABB bounds() const override { return bounds_; }
    void sample(const Vec3& p, float* out) const override;
    Vec3 spacing() const override { return spacing_; }

  private:
    const Volume& volume_;
    Vec3 spacing_;
    AABB bounds_;
    double norm_;
};

/// One pyramid level sampled through the render cache: the center
/// block plus its 26 same-level neighbors are pinned at construction
/// so sampling needs no locks. Voxels in unpinned blocks read as 0
/// (cross-level seams tolerate this; the schedule keeps same-level
/// neighborhoods resident where it matters).
class CachedLevelField final : public FieldSampler {
  public:
    CachedLevelField(const VolumeMeta& meta, const CacheKey& center, const BlockCache& cache);

    int channels() const override { return meta_.channels; }
    AABB bounds() const override { return bounds_; }
    void sample(const Vec3& p, float* out) const override;
    Vec3 spacing() const override { return spacing_; }

  private:
    const std::uint8_t* voxel_ptr(std::int64_t bx, std::int64_t by, std::int64_t bz) const;

    VolumeMeta meta_;
    CacheKey center_;
    std::array<std::shared_ptr<const Block>, 27> hood_{};
    std::array<std::uint32_t, 3> level_dims_{};
    Vec3 spacing_;
    AABB bounds_;
    double norm_;
};

/// Arbitrary analytic field for tests and synthetic scenes.
class AnalyticField final : public FieldSampler {
  public:
    using Fn = std::function<double(const Vec3&)>;

    AnalyticField(AABB bounds, Vec3 spacing, Fn fn)
        : bounds_(bounds), spacing_(spacing), fn_(std::move(fn)) {}

    int channels() const override { return 1; }
    AABB bounds() const override { return bounds_; }
    void sample(const Vec3& p, float* out) const override {
        out[0] = bounds_.contains(p) ? static_cast<float>(fn_(p)) : 0.f;
    }
    Vec3 spacing() const override { return spacing_; }

  private:
    AABB bounds_;
    Vec3 spacing_;
    Fn fn_;
};

}  // namespace voxcast

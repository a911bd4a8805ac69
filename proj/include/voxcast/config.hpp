#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxcast/camera.hpp"
#include "voxcast/dvr.hpp"
#include "voxcast/geometry.hpp"
#include "voxcast/transfer_function.hpp"
#include "voxcast/warp.hpp"

namespace voxcast {

/// Flat key=value text with [section] headers and '#' comments.
/// Values are whitespace-separated tokens; keys are addressed as
/// "section.key".
class ConfigFile {
  public:
    static ConfigFile load(const std::string& path);
    static ConfigFile parse(const std::string& text, const std::string& origin = "<inline>");

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;

  private:
    const std::vector<std::string>* find(const std::string& key) const;

    std::string origin_;
    std::map<std::string, std::vector<std::string>> values_;
};

/// Everything cmd_render needs, validated at load time.
struct RenderConfig {
    std::string container_path;

    // camera block
    Vec3 cam_position{0, 0, 0};
    Vec3 cam_look_at{0, 0, -1};
    Vec3 cam_up{0, 1, 0};
    double vfov_rad = deg_to_rad(60);
    int width = 512, height = 512;
    double near_clip = 1.0;
    double far_clip = 1e9;

    OpticalModel model = OpticalModel::emission;
    double step_scale = 0.5;  // times the finest voxel spacing
    double term_eps = 1e-3;
    double lod_quality = 1.0;

    TransferFunction tf;

    // warp block
    std::string warp_variant = "identity";
    double warp_k1 = 0.0, warp_k2 = 0.0;
    double warp_scale = 1.0;
    double distort_k1 = 0.0, distort_k2 = 0.0;

    std::size_t cache_memory_bytes = 512ull << 20;
    std::size_t cache_render_bytes = 128ull << 20;

    std::vector<std::string> mesh_paths;
    Vec3 mesh_color{0.8, 0.8, 0.8};
    std::vector<std::string> swc_paths;

    DirectionalLight light;

    bool stereo = false;
    double stereo_ipd = 63.0;  // world units (micrometers)

    std::string out_png;
    std::string out_pfm;
    std::string out_stats;  // empty: stats to stdout

    int threads = 0;  // 0: resolve from env/hardware

    static RenderConfig load(const std::string& path);
    static RenderConfig from_config(const ConfigFile& cfg);

    Camera make_camera() const;
    WarpMap make_warp() const;

    /// Post-process barrel distortion (display -> display), identity
    /// when both coefficients are 0.
    std::optional<WarpMap> make_distort() const;
};

OpticalModel parse_model(const std::string& name);

}  // namespace voxcast

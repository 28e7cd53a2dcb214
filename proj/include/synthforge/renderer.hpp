#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <vector>

#include "synthforge/bvh.hpp"
#include "synthforge/image.hpp"
#include "synthforge/sampling.hpp"

namespace synthforge {

/// The rendering knobs: raster size, per-pixel supersampling, shading
/// constants. Defaults follow the repo's example configuration.
struct RenderConfig {
    int width = 300;
    int height = 300;
    int samples_per_pixel = 64;
    double ambient = 0.08;                               // flat term so unlit faces are not pure black
    double fov_y = 40.0 * std::numbers::pi / 180.0;      // radians
    double gamma = 2.2;                                  // encode exponent (linear math internally)

    void validate() const;
};

/// Pinhole camera with a look-at basis.
class Camera {
public:
    Camera(const Vec3& position, const Vec3& target, const Vec3& up, double fov_y, int width,
           int height);

    /// Primary ray through pixel (px, py) at sub-pixel offset (jx, jy) in [0,1).
    Ray ray(int px, int py, double jx, double jy) const;

private:
    Vec3 position_, forward_, right_, up_;
    double tan_half_fov_, aspect_;
    double inv_width_, inv_height_;
};

/// 8-bit -> linear decode table for one gamma value.
struct GammaLut {
    std::array<double, 256> to_linear{};
};

GammaLut make_gamma_lut(double gamma);

/// Bilinear texture fetch in linear space. UVs wrap; v=0 is the bottom row.
Vec3 sample_texture(const ImageU8& texture, const Vec2& uv, const GammaLut& lut);

/// Lambertian point-lamp shading:
///   rgb = albedo(uv) * (ambient + sum_i E_i * max(0, n.l_i) / d_i^2), clamped to [0,1].
/// Lamps occluded by `occluder` (when given) contribute nothing.
Vec3 shade(const Vec3& point, const Vec3& normal, const Vec2& uv, const ImageU8& texture,
           const GammaLut& lut, const std::vector<Lamp>& lamps, double ambient,
           const Bvh* occluder = nullptr);

/// Per-pixel sample stream derivation; fixed so that renders are independent
/// of pixel processing order and re-traceable by tests.
std::uint64_t pixel_stream_seed(std::uint64_t scene_seed, int pixel_index);

/// Ray-traces the pose image: gamma-encoded RGB averaged over the primary
/// rays that hit, alpha = hit fraction (0 exactly where nothing was hit).
/// Pure function of (mesh, scene, config).
RgbaImage render(const TexturedMesh& mesh, const Bvh& bvh, const SceneSample& scene,
                 const RenderConfig& config);

}  // namespace synthforge

#include "synthforge/renderer.hpp"

#include <cmath>
#include <stdexcept>

namespace synthforge {

void RenderConfig::validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("render: width/height must be >= 1");
    if (samples_per_pixel < 1)
        throw std::invalid_argument("render: samples_per_pixel must be >= 1");
    if (!(ambient >= 0.0 && ambient <= 1.0))
        throw std::invalid_argument("render: ambient must be in [0,1]");
    if (!(fov_y > 0.0 && fov_y < std::numbers::pi))
        throw std::invalid_argument("render: fov_y must be in (0, pi)");
    if (!(gamma > 0.0)) throw std::invalid_argument("render: gamma must be > 0");
}

Camera::Camera(const Vec3& position, const Vec3& target, const Vec3& up, double fov_y, int width,
               int height)
    : position_(position) {
    forward_ = normalize(target - position);
    right_ = normalize(cross(forward_, up));
    up_ = cross(right_, forward_);
    tan_half_fov_ = std::tan(fov_y * 0.5);
    aspect_ = static_cast<double>(width) / static_cast<double>(height);
    inv_width_ = 1.0 / width;
    inv_height_ = 1.0 / height;
}

Ray Camera::ray(int px, int py, double jx, double jy) const {
    const double ndc_x = (px + jx) * inv_width_;
    const double ndc_y = (py + jy) * inv_height_;
    const double sx = (2.0 * ndc_x - 1.0) * tan_half_fov_ * aspect_;
    const double sy = (1.0 - 2.0 * ndc_y) * tan_half_fov_;
    return {position_, normalize(forward_ + sx * right_ + sy * up_)};
}

GammaLut make_gamma_lut(double gamma) {
    GammaLut lut;
    for (int i = 0; i < 256; ++i)
        lut.to_linear[static_cast<std::size_t>(i)] = std::pow(i / 255.0, gamma);
    return lut;
}

namespace {

int wrap_index(int i, int n) {
    const int m = i % n;
    return m < 0 ? m + n : m;
}

double wrap01(double u) { return u - std::floor(u); }

}  // namespace

Vec3 sample_texture(const ImageU8& texture, const Vec2& uv, const GammaLut& lut) {
    const int w = texture.width;
    const int h = texture.height;
    // obj uv origin is bottom-left; raster rows start at the top
    const double x = wrap01(uv.x) * w - 0.5;
    const double y = (1.0 - wrap01(uv.y)) * h - 0.5;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const int xi0 = wrap_index(x0, w), xi1 = wrap_index(x0 + 1, w);
    const int yi0 = wrap_index(y0, h), yi1 = wrap_index(y0 + 1, h);

    Vec3 out;
    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;
    const std::uint8_t* p00 = texture.pixel(xi0, yi0);
    const std::uint8_t* p10 = texture.pixel(xi1, yi0);
    const std::uint8_t* p01 = texture.pixel(xi0, yi1);
    const std::uint8_t* p11 = texture.pixel(xi1, yi1);
    double* dst = &out.x;
    for (int c = 0; c < 3; ++c) {
        dst[c] = w00 * lut.to_linear[p00[c]] + w10 * lut.to_linear[p10[c]] +
                 w01 * lut.to_linear[p01[c]] + w11 * lut.to_linear[p11[c]];
    }
    return out;
}

Vec3 shade(const Vec3& point, const Vec3& normal, const Vec2& uv, const ImageU8& texture,
           const GammaLut& lut, const std::vector<Lamp>& lamps, double ambient,
           const Bvh* occluder) {
    const Vec3 albedo = sample_texture(texture, uv, lut);
    double radiance = ambient;
    for (const Lamp& lamp : lamps) {
        const Vec3 to_lamp = lamp.position - point;
        const double d2 = length_squared(to_lamp);
        if (d2 < 1e-12) continue;  // lamp sitting on the surface
        const double d = std::sqrt(d2);
        const Vec3 l = to_lamp / d;
        const double n_dot_l = dot(normal, l);
        if (n_dot_l <= 0.0) continue;
        if (occluder && occluder->occluded({point, l}, d - kRayEpsilon)) continue;
        radiance += lamp.energy * n_dot_l / d2;
    }
    return {std::clamp(albedo.x * radiance, 0.0, 1.0), std::clamp(albedo.y * radiance, 0.0, 1.0),
            std::clamp(albedo.z * radiance, 0.0, 1.0)};
}

std::uint64_t pixel_stream_seed(std::uint64_t scene_seed, int pixel_index) {
    return mix64(mix64(scene_seed) + static_cast<std::uint64_t>(pixel_index) * 0x9E3779B97F4A7C15ULL);
}

RgbaImage render(const TexturedMesh& mesh, const Bvh& bvh, const SceneSample& scene,
                 const RenderConfig& config) {
    config.validate();
    if (scene.camera_position == scene.camera_target)
        throw std::invalid_argument("render: camera position equals target");

    const Camera camera(scene.camera_position, scene.camera_target, scene.camera_up, config.fov_y,
                        config.width, config.height);
    const GammaLut lut = make_gamma_lut(config.gamma);
    const double inv_gamma = 1.0 / config.gamma;
    const int spp = config.samples_per_pixel;

    RgbaImage img(config.width, config.height);
    for (int y = 0; y < config.height; ++y) {
        for (int x = 0; x < config.width; ++x) {
            const int pixel_index = y * config.width + x;
            Rng rng(pixel_stream_seed(scene.rng_seed, pixel_index));
            Vec3 sum;
            int hits = 0;
            for (int s = 0; s < spp; ++s) {
                const double jx = rng.uniform01();
                const double jy = rng.uniform01();
                const Ray ray = camera.ray(x, y, jx, jy);
                const auto hit = bvh.intersect(ray);
                if (!hit) continue;
                ++hits;
                const Triangle& tri = mesh.triangles[static_cast<std::size_t>(hit->triangle)];
                const Vec3 point = ray.origin + ray.dir * hit->t;
                Vec3 n = hit->b0 * mesh.vertex_normals[static_cast<std::size_t>(tri.v[0])] +
                         hit->b1 * mesh.vertex_normals[static_cast<std::size_t>(tri.v[1])] +
                         hit->b2 * mesh.vertex_normals[static_cast<std::size_t>(tri.v[2])];
                const double nlen = length(n);
                n = nlen > 1e-12 ? n / nlen : face_normal(mesh, static_cast<std::size_t>(hit->triangle));
                const Vec2 uv{
                    hit->b0 * mesh.uvs[static_cast<std::size_t>(tri.uv[0])].x +
                        hit->b1 * mesh.uvs[static_cast<std::size_t>(tri.uv[1])].x +
                        hit->b2 * mesh.uvs[static_cast<std::size_t>(tri.uv[2])].x,
                    hit->b0 * mesh.uvs[static_cast<std::size_t>(tri.uv[0])].y +
                        hit->b1 * mesh.uvs[static_cast<std::size_t>(tri.uv[1])].y +
                        hit->b2 * mesh.uvs[static_cast<std::size_t>(tri.uv[2])].y};
                sum += shade(point, n, uv, mesh.texture, lut, scene.lamps, config.ambient, &bvh);
            }
            float* px = img.pixel(x, y);
            if (hits > 0) {
                const Vec3 mean = sum / hits;
                px[0] = static_cast<float>(std::pow(mean.x, inv_gamma));
                px[1] = static_cast<float>(std::pow(mean.y, inv_gamma));
                px[2] = static_cast<float>(std::pow(mean.z, inv_gamma));
            }
            px[3] = static_cast<float>(hits) / static_cast<float>(spp);
        }
    }
    return img;
}

}  // namespace synthforge

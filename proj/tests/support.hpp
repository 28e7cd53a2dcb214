#pragma once

// Shared test fixtures and independent oracles. Everything here is
// deliberately written against the public headers only; oracles duplicate
// none of the implementation paths they check.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "synthforge/bvh.hpp"
#include "synthforge/evaluation.hpp"
#include "synthforge/mesh.hpp"
#include "synthforge/rng.hpp"

namespace testsupport {

namespace fs = std::filesystem;

/// Unique disposable directory under the system temp root.
struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path = fs::temp_directory_path() /
               ("synthforge_" + tag + "_" + std::to_string(rd()) + "_" +
                std::to_string(counter.fetch_add(1)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

// ---------------------------------------------------------------------------
// distribution oracles

inline double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Closed-form conditional CDF of the truncated normal.
inline double truncnorm_cdf(double x, double mu, double sigma, double a, double b) {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    const double lo = normal_cdf((a - mu) / sigma);
    const double hi = normal_cdf((b - mu) / sigma);
    return (normal_cdf((x - mu) / sigma) - lo) / (hi - lo);
}

// ---------------------------------------------------------------------------
// geometry oracles and fixtures

/// Nearest hit by scanning every triangle; ties keep the lowest triangle id.
inline std::optional<synthforge::Hit> brute_force_hit(const synthforge::TexturedMesh& mesh,
                                                      const synthforge::Ray& ray,
                                                      double t_max = 1e30) {
    std::optional<synthforge::Hit> best;
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const synthforge::Triangle& tri = mesh.triangles[i];
        auto hit = synthforge::intersect_triangle(
            ray, mesh.vertices[static_cast<std::size_t>(tri.v[0])],
            mesh.vertices[static_cast<std::size_t>(tri.v[1])],
            mesh.vertices[static_cast<std::size_t>(tri.v[2])], synthforge::kRayEpsilon, t_max);
        if (!hit) continue;
        hit->triangle = static_cast<int>(i);
        if (!best || hit->t < best->t) best = *hit;
    }
    return best;
}

inline synthforge::ImageU8 solid_texture(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                                         int w = 1, int h = 1) {
    synthforge::ImageU8 tex(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            auto* p = tex.pixel(x, y);
            p[0] = r;
            p[1] = g;
            p[2] = b;
        }
    return tex;
}

/// Unit quad in the z = 0 plane, normal +Z, already origin-centered.
inline synthforge::TexturedMesh make_quad_mesh(double size = 1.0,
                                               synthforge::ImageU8 texture = solid_texture(255, 255,
                                                                                           255)) {
    synthforge::TexturedMesh mesh;
    const double s = size / 2.0;
    mesh.vertices = {{-s, -s, 0.0}, {s, -s, 0.0}, {s, s, 0.0}, {-s, s, 0.0}};
    mesh.uvs = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    mesh.triangles = {{{0, 1, 2}, {0, 1, 2}}, {{0, 2, 3}, {0, 2, 3}}};
    mesh.texture = std::move(texture);
    mesh.validate();
    synthforge::compute_vertex_normals(mesh);
    return mesh;
}

/// Exact right-handed quarter turn about Z: (x, y, z) -> (-y, x, z).
inline synthforge::Vec3 rot_z_90(const synthforge::Vec3& v) { return {-v.y, v.x, v.z}; }

/// Unit cube whose triangle list maps onto itself, tuple for tuple, under
/// rot_z_90: sides generated by rotating a +X face, caps as center fans.
/// All coordinates are exactly representable, so a rotated scene renders
/// through exactly corresponding arithmetic.
inline synthforge::TexturedMesh make_symmetric_cube(synthforge::ImageU8 texture = solid_texture(
                                                        255, 255, 255)) {
    using synthforge::Vec3;
    synthforge::TexturedMesh mesh;
    mesh.uvs = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    std::map<std::tuple<double, double, double>, int> index_of;
    auto vertex = [&](const Vec3& p) {
        const auto key = std::make_tuple(p.x, p.y, p.z);
        auto it = index_of.find(key);
        if (it != index_of.end()) return it->second;
        const int id = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(p);
        index_of.emplace(key, id);
        return id;
    };
    auto add_rotations = [&](Vec3 a, Vec3 b, Vec3 c) {
        for (int k = 0; k < 4; ++k) {
            mesh.triangles.push_back({{vertex(a), vertex(b), vertex(c)}, {0, 1, 2}});
            a = rot_z_90(a);
            b = rot_z_90(b);
            c = rot_z_90(c);
        }
    };
    // +X side face split into two triangles, outward winding
    add_rotations({0.5, -0.5, -0.5}, {0.5, 0.5, -0.5}, {0.5, 0.5, 0.5});
    add_rotations({0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, {0.5, -0.5, 0.5});
    // cap fans from the face centers (fixed points of the rotation)
    add_rotations({0.0, 0.0, 0.5}, {0.5, -0.5, 0.5}, {0.5, 0.5, 0.5});
    add_rotations({0.0, 0.0, -0.5}, {0.5, 0.5, -0.5}, {0.5, -0.5, -0.5});
    mesh.texture = std::move(texture);
    mesh.validate();
    synthforge::compute_vertex_normals(mesh);
    return mesh;
}

/// n random triangles in [-1, 1]^3; a worst-case structure for the BVH.
inline synthforge::TexturedMesh make_random_soup(int n, synthforge::Rng& rng) {
    synthforge::TexturedMesh mesh;
    mesh.uvs = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (int i = 0; i < n; ++i) {
        const int base = static_cast<int>(mesh.vertices.size());
        const synthforge::Vec3 anchor{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                      rng.uniform(-1.0, 1.0)};
        mesh.vertices.push_back(anchor);
        for (int k = 0; k < 2; ++k)
            mesh.vertices.push_back(anchor + synthforge::Vec3{rng.uniform(-0.4, 0.4),
                                                              rng.uniform(-0.4, 0.4),
                                                              rng.uniform(-0.4, 0.4)});
        mesh.triangles.push_back({{base, base + 1, base + 2}, {0, 1, 2}});
    }
    mesh.texture = solid_texture(255, 255, 255);
    mesh.validate();
    synthforge::compute_vertex_normals(mesh);
    return mesh;
}

// ---------------------------------------------------------------------------
// annotation oracle

/// Exhaustive min/max scan, written independently of tight_bbox.
inline std::optional<synthforge::BoundingBox> brute_force_bbox(const synthforge::ImageU8& mask) {
    bool any = false;
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (mask.pixel(x, y)[0] == 0) continue;
            if (!any) {
                x_min = x_max = x;
                y_min = y_max = y;
                any = true;
            } else {
                if (x < x_min) x_min = x;
                if (x > x_max) x_max = x;
                if (y < y_min) y_min = y;
                if (y > y_max) y_max = y;
            }
        }
    if (!any) return std::nullopt;
    return synthforge::BoundingBox{x_min, y_min, x_max, y_max};
}

// ---------------------------------------------------------------------------
// evaluation oracle

/// DAC by repeated max-scan selection, independent of the sort-based path.
inline double brute_force_dac(const std::vector<synthforge::PredictionRecord>& predictions,
                              const std::map<std::string, int>& truth, int k) {
    std::size_t tp = 0;
    for (const auto& [image_id, true_class] : truth) {
        const synthforge::PredictionRecord* rec = nullptr;
        for (const auto& r : predictions)
            if (r.image_id == image_id) {
                rec = &r;
                break;
            }
        if (!rec) continue;
        std::vector<synthforge::PredictionEntry> pool = rec->entries;
        bool found = false;
        for (int round = 0; round < k && !pool.empty(); ++round) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < pool.size(); ++i) {
                const bool better =
                    pool[i].confidence > pool[best].confidence ||
                    (pool[i].confidence == pool[best].confidence &&
                     pool[i].class_id < pool[best].class_id);
                if (better) best = i;
            }
            if (pool[best].class_id == true_class) {
                found = true;
                break;
            }
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
        }
        if (found) ++tp;
    }
    return static_cast<double>(tp) / static_cast<double>(truth.size());
}

}  // namespace testsupport

#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "synthforge/image.hpp"
#include "synthforge/vec.hpp"

namespace synthforge {

struct Aabb {
    Vec3 min{1e30, 1e30, 1e30};
    Vec3 max{-1e30, -1e30, -1e30};

    void grow(const Vec3& p) {
        min = synthforge::min(min, p);
        max = synthforge::max(max, p);
    }
    void grow(const Aabb& b) {
        min = synthforge::min(min, b.min);
        max = synthforge::max(max, b.max);
    }
    Vec3 extent() const { return max - min; }
    Vec3 center() const { return (min + max) * 0.5; }
};

struct Triangle {
    std::array<int, 3> v;   // vertex indices
    std::array<int, 3> uv;  // uv indices
};

/// Triangle geometry with per-corner UVs and an 8-bit RGB texture raster.
/// The renderable subject; photogrammetry output after loading.
struct TexturedMesh {
    std::vector<Vec3> vertices;
    std::vector<Vec2> uvs;
    std::vector<Triangle> triangles;
    std::vector<Vec3> vertex_normals;  // area-weighted, recomputed on load/normalize
    ImageU8 texture;

    void validate() const;  // index bounds + non-empty texture
};

Aabb mesh_bounds(const TexturedMesh& mesh);

/// Geometric normal of triangle t, unit length (zero vector if degenerate).
Vec3 face_normal(const TexturedMesh& mesh, std::size_t t);

/// Area-weighted smooth normals accumulated per vertex.
void compute_vertex_normals(TexturedMesh& mesh);

/// Parses a Wavefront OBJ (v / vt / f records, negative indices allowed,
/// polygons fan-triangulated) and pairs it with a PNG or JPEG texture.
/// Parse errors carry the offending line number.
TexturedMesh load_mesh(const std::filesystem::path& geometry_path,
                       const std::filesystem::path& texture_path);

/// Centers the bounding box on the origin and scales the longest box edge to
/// length 1. Triangles degenerate after scaling (area <= 1e-12) are dropped.
TexturedMesh normalize_mesh(TexturedMesh mesh);

}  // namespace synthforge

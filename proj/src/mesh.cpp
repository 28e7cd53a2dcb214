#include "synthforge/mesh.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "synthforge/errors.hpp"
#include "synthforge/log.hpp"

namespace synthforge {

namespace fs = std::filesystem;

void TexturedMesh::validate() const {
    const int nv = static_cast<int>(vertices.size());
    const int nt = static_cast<int>(uvs.size());
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        const Triangle& tri = triangles[i];
        for (int k = 0; k < 3; ++k) {
            if (tri.v[k] < 0 || tri.v[k] >= nv)
                throw io_error("mesh: triangle " + std::to_string(i) + " vertex index out of range");
            if (tri.uv[k] < 0 || tri.uv[k] >= nt)
                throw io_error("mesh: triangle " + std::to_string(i) + " uv index out of range");
        }
    }
    if (texture.width < 1 || texture.height < 1) throw io_error("mesh: empty texture");
}

Aabb mesh_bounds(const TexturedMesh& mesh) {
    Aabb box;
    for (const Vec3& v : mesh.vertices) box.grow(v);
    return box;
}

Vec3 face_normal(const TexturedMesh& mesh, std::size_t t) {
    const Triangle& tri = mesh.triangles[t];
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(tri.v[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(tri.v[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(tri.v[2])];
    const Vec3 n = cross(b - a, c - a);
    const double len = length(n);
    if (len < 1e-30) return {0.0, 0.0, 0.0};
    return n / len;
}

void compute_vertex_normals(TexturedMesh& mesh) {
    mesh.vertex_normals.assign(mesh.vertices.size(), Vec3{});
    for (const Triangle& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[static_cast<std::size_t>(tri.v[0])];
        const Vec3& b = mesh.vertices[static_cast<std::size_t>(tri.v[1])];
        const Vec3& c = mesh.vertices[static_cast<std::size_t>(tri.v[2])];
        const Vec3 weighted = cross(b - a, c - a);  // length = 2 * area
        for (int k = 0; k < 3; ++k) mesh.vertex_normals[static_cast<std::size_t>(tri.v[k])] += weighted;
    }
    for (Vec3& n : mesh.vertex_normals) {
        const double len = length(n);
        if (len > 1e-30) n = n / len;
    }
}

namespace {

struct ObjIndex {
    int v = 0;
    int uv = 0;
    bool has_uv = false;
};

[[noreturn]] void parse_fail(const fs::path& path, int line, const std::string& msg) {
    throw io_error(path.string() + ":" + std::to_string(line) + ": " + msg);
}

// accepts "i", "i/j", "i//k", "i/j/k"
ObjIndex parse_face_corner(const std::string& token, const fs::path& path, int line) {
    ObjIndex idx;
    const char* s = token.c_str();
    char* end = nullptr;
    idx.v = static_cast<int>(std::strtol(s, &end, 10));
    if (end == s) parse_fail(path, line, "malformed face corner '" + token + "'");
    if (*end == '/') {
        const char* uv_s = end + 1;
        if (*uv_s != '/' && *uv_s != '\0') {
            idx.uv = static_cast<int>(std::strtol(uv_s, &end, 10));
            if (end == uv_s) parse_fail(path, line, "malformed face corner '" + token + "'");
            idx.has_uv = true;
        }
        // trailing normal index, if any, is ignored: normals are recomputed
    }
    return idx;
}

int resolve_index(int raw, int count, const char* what, const fs::path& path, int line) {
    int idx = raw;
    if (idx < 0) idx += count;       // relative
    else idx -= 1;                   // obj is 1-based
    if (idx < 0 || idx >= count)
        parse_fail(path, line, std::string(what) + " index " + std::to_string(raw) +
                                   " out of range (have " + std::to_string(count) + ")");
    return idx;
}

double parse_real(const std::string& token, const fs::path& path, int line) {
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') parse_fail(path, line, "bad number '" + token + "'");
    return v;
}

}  // namespace

TexturedMesh load_mesh(const fs::path& geometry_path, const fs::path& texture_path) {
    std::ifstream in(geometry_path);
    if (!in) throw io_error("cannot open mesh file: " + geometry_path.string());

    TexturedMesh mesh;
    std::string line;
    int line_no = 0;
    std::vector<std::string> tokens;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        tokens.clear();
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            if (tok[0] == '#') break;
            tokens.push_back(tok);
        }
        if (tokens.empty()) continue;
        const std::string& kw = tokens[0];

        if (kw == "v") {
            if (tokens.size() < 4) parse_fail(geometry_path, line_no, "vertex needs 3 coordinates");
            mesh.vertices.push_back({parse_real(tokens[1], geometry_path, line_no),
                                     parse_real(tokens[2], geometry_path, line_no),
                                     parse_real(tokens[3], geometry_path, line_no)});
        } else if (kw == "vt") {
            if (tokens.size() < 3) parse_fail(geometry_path, line_no, "uv needs 2 coordinates");
            mesh.uvs.push_back({parse_real(tokens[1], geometry_path, line_no),
                                parse_real(tokens[2], geometry_path, line_no)});
        } else if (kw == "f") {
            if (tokens.size() < 4) parse_fail(geometry_path, line_no, "face needs at least 3 corners");
            std::vector<ObjIndex> corners;
            corners.reserve(tokens.size() - 1);
            for (std::size_t i = 1; i < tokens.size(); ++i)
                corners.push_back(parse_face_corner(tokens[i], geometry_path, line_no));
            const int nv = static_cast<int>(mesh.vertices.size());
            const int nuv = static_cast<int>(mesh.uvs.size());
            std::vector<int> v_idx, uv_idx;
            for (const ObjIndex& c : corners) {
                if (!c.has_uv)
                    parse_fail(geometry_path, line_no,
                               "face corner has no uv index; textured meshes require vt references");
                v_idx.push_back(resolve_index(c.v, nv, "vertex", geometry_path, line_no));
                uv_idx.push_back(resolve_index(c.uv, nuv, "uv", geometry_path, line_no));
            }
            // fan triangulation; exact for the convex polygons scanners emit
            for (std::size_t i = 1; i + 1 < v_idx.size(); ++i) {
                mesh.triangles.push_back(Triangle{{v_idx[0], v_idx[i], v_idx[i + 1]},
                                                  {uv_idx[0], uv_idx[i], uv_idx[i + 1]}});
            }
        }
        // vn / o / g / s / usemtl / mtllib are intentionally skipped
    }
    if (mesh.triangles.empty()) throw io_error("mesh has no faces: " + geometry_path.string());

    mesh.texture = load_image(texture_path, /*force_rgb=*/true);
    mesh.validate();
    compute_vertex_normals(mesh);
    log_debug("loaded mesh " + geometry_path.string() + ": " + std::to_string(mesh.vertices.size()) +
              " vertices, " + std::to_string(mesh.triangles.size()) + " triangles");
    return mesh;
}

TexturedMesh normalize_mesh(TexturedMesh mesh) {
    if (mesh.vertices.empty() || mesh.triangles.empty())
        throw io_error("normalize_mesh: empty mesh");
    const Aabb box = mesh_bounds(mesh);
    const Vec3 ext = box.extent();
    const double longest = std::max({ext.x, ext.y, ext.z});
    if (longest <= 0.0) throw io_error("normalize_mesh: mesh has zero extent");
    const Vec3 center = box.center();
    const double scale = 1.0 / longest;
    for (Vec3& v : mesh.vertices) v = (v - center) * scale;

    std::vector<Triangle> kept;
    kept.reserve(mesh.triangles.size());
    for (const Triangle& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[static_cast<std::size_t>(tri.v[0])];
        const Vec3& b = mesh.vertices[static_cast<std::size_t>(tri.v[1])];
        const Vec3& c = mesh.vertices[static_cast<std::size_t>(tri.v[2])];
        const double area = 0.5 * length(cross(b - a, c - a));
        if (area > 1e-12) kept.push_back(tri);
    }
    if (kept.size() != mesh.triangles.size())
        log_debug("normalize_mesh: dropped " + std::to_string(mesh.triangles.size() - kept.size()) +
                  " degenerate triangles");
    if (kept.empty()) throw io_error("normalize_mesh: all triangles degenerate");
    mesh.triangles = std::move(kept);
    compute_vertex_normals(mesh);
    return mesh;
}

}  // namespace synthforge

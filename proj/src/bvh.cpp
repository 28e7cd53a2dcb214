#include "synthforge/bvh.hpp"

#include <algorithm>
#include <cmath>

namespace synthforge {

std::optional<Hit> intersect_triangle(const Ray& ray, const Vec3& p0, const Vec3& p1,
                                      const Vec3& p2, double t_min, double t_max) {
    const Vec3 e1 = p1 - p0;
    const Vec3 e2 = p2 - p0;
    const Vec3 pvec = cross(ray.dir, e2);
    const double det = dot(e1, pvec);
    if (std::abs(det) < 1e-18) return std::nullopt;  // parallel
    const double inv_det = 1.0 / det;
    const Vec3 tvec = ray.origin - p0;
    const double u = dot(tvec, pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 qvec = cross(tvec, e1);
    const double v = dot(ray.dir, qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = dot(e2, qvec) * inv_det;
    if (t <= t_min || t >= t_max) return std::nullopt;
    Hit hit;
    hit.t = t;
    hit.b1 = u;
    hit.b2 = v;
    hit.b0 = 1.0 - u - v;
    return hit;
}

namespace {

struct RayInv {
    Vec3 origin;
    Vec3 inv_dir;
};

bool slab_hit(const Aabb& box, const RayInv& r, double t_max) {
    double t0 = (box.min.x - r.origin.x) * r.inv_dir.x;
    double t1 = (box.max.x - r.origin.x) * r.inv_dir.x;
    double tnear = std::fmin(t0, t1);
    double tfar = std::fmax(t0, t1);
    t0 = (box.min.y - r.origin.y) * r.inv_dir.y;
    t1 = (box.max.y - r.origin.y) * r.inv_dir.y;
    tnear = std::fmax(tnear, std::fmin(t0, t1));
    tfar = std::fmin(tfar, std::fmax(t0, t1));
    t0 = (box.min.z - r.origin.z) * r.inv_dir.z;
    t1 = (box.max.z - r.origin.z) * r.inv_dir.z;
    tnear = std::fmax(tnear, std::fmin(t0, t1));
    tfar = std::fmin(tfar, std::fmax(t0, t1));
    return tnear <= tfar && tfar > 0.0 && tnear < t_max;
}

}  // namespace

int Bvh::build_node(std::vector<int>& tris, int begin, int end,
                    const std::vector<Aabb>& tri_bounds, const std::vector<Vec3>& centroids) {
    Node node;
    for (int i = begin; i < end; ++i) node.bounds.grow(tri_bounds[static_cast<std::size_t>(tris[static_cast<std::size_t>(i)])]);

    const int count = end - begin;
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    if (count <= 4) {
        nodes_[static_cast<std::size_t>(node_index)].left = begin;
        nodes_[static_cast<std::size_t>(node_index)].count = count;
        return node_index;
    }

    Aabb cbox;
    for (int i = begin; i < end; ++i) cbox.grow(centroids[static_cast<std::size_t>(tris[static_cast<std::size_t>(i)])]);
    const Vec3 ext = cbox.extent();
    int axis = 0;
    if (ext.y > ext.x) axis = 1;
    if (ext.z > (axis == 0 ? ext.x : ext.y)) axis = 2;

    const int mid = begin + count / 2;
    auto key = [&](int tri) {
        const Vec3& c = centroids[static_cast<std::size_t>(tri)];
        return axis == 0 ? c.x : axis == 1 ? c.y : c.z;
    };
    std::nth_element(tris.begin() + begin, tris.begin() + mid, tris.begin() + end,
                     [&](int a, int b) { return key(a) < key(b) || (key(a) == key(b) && a < b); });

    const int left = build_node(tris, begin, mid, tri_bounds, centroids);
    const int right = build_node(tris, mid, end, tri_bounds, centroids);
    nodes_[static_cast<std::size_t>(node_index)].left = left;
    nodes_[static_cast<std::size_t>(node_index)].right = right;
    return node_index;
}

Bvh build_bvh(const TexturedMesh& mesh) {
    mesh.validate();
    Bvh bvh;
    bvh.mesh_ = &mesh;
    const auto n = static_cast<int>(mesh.triangles.size());
    std::vector<Aabb> tri_bounds(static_cast<std::size_t>(n));
    std::vector<Vec3> centroids(static_cast<std::size_t>(n));
    std::vector<int> tris(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Triangle& tri = mesh.triangles[static_cast<std::size_t>(i)];
        Aabb box;
        for (int k = 0; k < 3; ++k) box.grow(mesh.vertices[static_cast<std::size_t>(tri.v[k])]);
        tri_bounds[static_cast<std::size_t>(i)] = box;
        centroids[static_cast<std::size_t>(i)] = box.center();
        tris[static_cast<std::size_t>(i)] = i;
    }
    bvh.nodes_.reserve(static_cast<std::size_t>(2 * n));
    bvh.build_node(tris, 0, n, tri_bounds, centroids);
    bvh.triangle_order_ = std::move(tris);
    return bvh;
}

std::optional<Hit> Bvh::intersect(const Ray& ray, double t_max) const {
    RayInv r{ray.origin, {1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z}};
    std::optional<Hit> best;
    double limit = t_max;
    int stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[static_cast<std::size_t>(stack[--sp])];
        if (!slab_hit(node.bounds, r, limit)) continue;
        if (node.count > 0) {
            for (int i = 0; i < node.count; ++i) {
                const int tri_id = triangle_order_[static_cast<std::size_t>(node.left + i)];
                const Triangle& tri = mesh_->triangles[static_cast<std::size_t>(tri_id)];
                auto hit = intersect_triangle(ray, mesh_->vertices[static_cast<std::size_t>(tri.v[0])],
                                              mesh_->vertices[static_cast<std::size_t>(tri.v[1])],
                                              mesh_->vertices[static_cast<std::size_t>(tri.v[2])],
                                              kRayEpsilon, limit);
                if (!hit) continue;
                hit->triangle = tri_id;
                if (!best || hit->t < best->t || (hit->t == best->t && tri_id < best->triangle)) {
                    best = *hit;
                    // keep limit open on exact ties so a lower id can still win
                    limit = std::nextafter(best->t, 1e30);
                }
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
    return best;
}

bool Bvh::occluded(const Ray& ray, double t_max) const {
    RayInv r{ray.origin, {1.0 / ray.dir.x, 1.0 / ray.dir.y, 1.0 / ray.dir.z}};
    int stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[static_cast<std::size_t>(stack[--sp])];
        if (!slab_hit(node.bounds, r, t_max)) continue;
        if (node.count > 0) {
            for (int i = 0; i < node.count; ++i) {
                const int tri_id = triangle_order_[static_cast<std::size_t>(node.left + i)];
                const Triangle& tri = mesh_->triangles[static_cast<std::size_t>(tri_id)];
                if (intersect_triangle(ray, mesh_->vertices[static_cast<std::size_t>(tri.v[0])],
                                       mesh_->vertices[static_cast<std::size_t>(tri.v[1])],
                                       mesh_->vertices[static_cast<std::size_t>(tri.v[2])],
                                       kRayEpsilon, t_max))
                    return true;
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
    return false;
}

}  // namespace synthforge

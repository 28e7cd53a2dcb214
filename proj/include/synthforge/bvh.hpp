#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "synthforge/mesh.hpp"
#include "synthforge/vec.hpp"

namespace synthforge {

struct Ray {
    Vec3 origin;
    Vec3 dir;  // unit length
};

struct Hit {
    double t = 0.0;
    int triangle = -1;
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;  // barycentrics over corners 0,1,2
};

/// Minimum parametric distance for every ray query; rejects self-hits.
inline constexpr double kRayEpsilon = 1e-6;

/// Moller-Trumbore against one triangle; hits with t in (t_min, t_max).
std::optional<Hit> intersect_triangle(const Ray& ray, const Vec3& p0, const Vec3& p1,
                                      const Vec3& p2, double t_min = kRayEpsilon,
                                      double t_max = 1e30);

/// Median-split bounding volume hierarchy over mesh triangles, leaf size <= 4.
/// Immutable after build; shared read-only across render workers.
class Bvh {
public:
    /// Nearest hit beyond kRayEpsilon. Ties on t prefer the lower triangle id.
    std::optional<Hit> intersect(const Ray& ray, double t_max = 1e30) const;

    /// Any-hit query for shadow rays: true if something lies in (t_min, t_max).
    bool occluded(const Ray& ray, double t_max) const;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t triangle_count() const { return triangle_order_.size(); }

    /// Leaf triangle ids in storage order, for structural checks.
    const std::vector<int>& triangle_order() const { return triangle_order_; }

    friend Bvh build_bvh(const TexturedMesh& mesh);

private:
    struct Node {
        Aabb bounds;
        int left = -1;    // internal: child index; leaf: first triangle slot
        int count = 0;    // leaf triangle count; 0 for internal nodes
        int right = -1;
    };

    const TexturedMesh* mesh_ = nullptr;
    std::vector<Node> nodes_;
    std::vector<int> triangle_order_;

    int build_node(std::vector<int>& tris, int begin, int end,
                   const std::vector<Aabb>& tri_bounds, const std::vector<Vec3>& centroids);
};

/// Builds the acceleration structure; the mesh must outlive the result.
Bvh build_bvh(const TexturedMesh& mesh);

}  // namespace synthforge

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/rt/facet.hpp"
#include "gert/vec3.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gert::scene {
struct Scene;
}

namespace gert::rt {

/// Nearest-hit query result.
struct RayHit {
    double t = 0.0;          // distance along the (unit-length) ray direction
    Vec3 point;              // intersection point
    int32_t triangle = -1;   // index into the acceleration structure's triangles
    int32_t facet = -1;      // merged-facet index
    int64_t object_id = -1;  // owning scene object
};

/// Bounding-volume hierarchy over all scene triangles together with the
/// merged planar facets and diffraction edges derived from the scene.
/// Immutable after construction and shareable across threads.
class AccelStructure {
public:
    AccelStructure() = default;

    /// Nearest intersection of the ray origin + t*dir (dir unit length) with
    /// t in (t_min, t_max), or nullopt.
    std::optional<RayHit> nearest(const Vec3& origin, const Vec3& dir,
                                  double t_min, double t_max) const;

    /// True when the open segment a..b is free of intersections, ignoring
    /// hits within `endpoint_clearance` metres of either endpoint.
    bool segment_clear(const Vec3& a, const Vec3& b,
                       double endpoint_clearance = 1e-6) const;

    const std::vector<Facet>& facets() const { return facets_; }
    const std::vector<DiffractionEdge>& edges() const { return edges_; }
    std::size_t triangle_count() const { return tris_.size(); }

private:
    friend AccelStructure build_accel(const scene::Scene&);

    struct Tri {
        Vec3 a, e1, e2;  // vertex + edge vectors, precomputed for intersection
        int32_t facet = -1;
        int64_t object_id = -1;
    };
    struct Node {
        Aabb box;
        int32_t left = -1;   // internal: child indices; leaf: -1
        int32_t right = -1;
        int32_t first = 0;   // leaf: triangle range
        int32_t count = 0;
    };

    int32_t build_node(std::vector<int32_t>& order, int32_t first, int32_t count,
                       const std::vector<Vec3>& centroids);

    std::vector<Tri> tris_;
    std::vector<Node> nodes_;
    std::vector<Facet> facets_;
    std::vector<DiffractionEdge> edges_;
};

/// Build the acceleration structure, merged facets, and diffraction edges
/// for a valid scene. An empty scene yields a structure where every query
/// misses.
AccelStructure build_accel(const scene::Scene& scene);

} // namespace gert::rt

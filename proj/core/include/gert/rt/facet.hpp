// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/vec3.hpp"

#include <cstdint>
#include <vector>

namespace gert::scene {
struct Scene;
struct TriangleMesh;
}

namespace gert::rt {

/// Maximal group of adjacent coplanar triangles within one object. Facets
/// are the mirrors of the image method: reflecting across a facet's plane
/// once covers every triangle in the group.
struct Facet {
    int64_t object_id = -1;
    Vec3 normal;                     // unit plane normal (first triangle's)
    double plane_d = 0.0;            // plane is normal . x == plane_d
    std::vector<Vec3> hull;          // convex hull of the facet's vertices,
                                     // in-plane; superset of the true outline
    Aabb box;
    std::vector<int32_t> triangles;  // global triangle indices
};

/// True when the two facets lie in the same geometric plane (either normal
/// orientation), in which case consecutive reflections across them are
/// impossible.
bool same_plane(const Facet& a, const Facet& b);

/// Group each mesh's triangles into facets. Triangles join a group when they
/// share an edge (as a vertex-index pair) and their unit normals agree to
/// within 1e-9. `triangle_facet` receives one facet index per global
/// triangle, where global index = offset of the mesh + local index and
/// meshes are concatenated in scene order.
std::vector<Facet> merge_facets(const std::vector<const scene::TriangleMesh*>& meshes,
                                std::vector<int32_t>& triangle_facet);

/// Straight diffracting edge of a building: either a vertical edge at a
/// convex footprint corner or a horizontal roof-perimeter edge. The exterior
/// wedge spans azimuths (0, n_index*pi) measured from the o-face tangent
/// `tangent_o` toward the face normal `normal_o`, rotating about `direction`
/// through the exterior region.
struct DiffractionEdge {
    int64_t object_id = -1;
    Vec3 a, b;           // endpoints, b - a parallel to `direction`
    Vec3 direction;      // unit edge vector, oriented to make the azimuth
                         // convention below right-handed
    Vec3 tangent_o;      // unit, in the o-face, perpendicular to the edge,
                         // pointing away from the edge into the face
    Vec3 normal_o;       // unit outward normal of the o-face
    double n_index = 2.0; // exterior angle / pi, in (1, 2]
    bool vertical = false; // true for wall-corner edges, false for roof rim

    /// Azimuth of a direction `v` (need not be unit) in [0, 2*pi): the
    /// component of v perpendicular to the edge, measured from tangent_o
    /// toward normal_o. Exterior points fall in (0, n_index*pi).
    double azimuth(const Vec3& v) const;
};

/// Extract the diffracting edges of every building in the scene from its
/// footprint metadata: one vertical edge per convex corner (exterior angle
/// n = 1 + turn/pi) and one roof-rim edge per footprint side (n = 3/2).
std::vector<DiffractionEdge> extract_edges(const scene::Scene& scene);

} // namespace gert::rt

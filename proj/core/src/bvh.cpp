// SPDX-License-Identifier: Apache-2.0
#include "gert/rt/bvh.hpp"

#include "gert/error.hpp"
#include "gert/scene/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gert::rt {

namespace {

constexpr int32_t kLeafSize = 4;

/// Moller-Trumbore intersection, two-sided (no backface culling).
/// Returns the ray parameter or a negative value on miss.
inline double intersect_triangle(const Vec3& o, const Vec3& d,
                                 const Vec3& a, const Vec3& e1, const Vec3& e2) {
    const Vec3 p = cross(d, e2);
    const double det = p.dot(e1);
    if (std::abs(det) < 1e-14) return -1.0;
    const double inv = 1.0 / det;
    const Vec3 s = o - a;
    const double u = s.dot(p) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) return -1.0;
    const Vec3 q = cross(s, e1);
    const double v = d.dot(q) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return -1.0;
    return e2.dot(q) * inv;
}

inline bool slab_hit(const Aabb& b, const Vec3& o, const Vec3& inv_d,
                     double t_min, double t_max) {
    double t0 = t_min, t1 = t_max;
    for (int axis = 0; axis < 3; ++axis) {
        const double lo = axis == 0 ? b.lo.x : axis == 1 ? b.lo.y : b.lo.z;
        const double hi = axis == 0 ? b.hi.x : axis == 1 ? b.hi.y : b.hi.z;
        const double ov = axis == 0 ? o.x : axis == 1 ? o.y : o.z;
        const double iv = axis == 0 ? inv_d.x : axis == 1 ? inv_d.y : inv_d.z;
        double ta = (lo - ov) * iv;
        double tb = (hi - ov) * iv;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

} // namespace

int32_t AccelStructure::build_node(std::vector<int32_t>& order, int32_t first,
                                   int32_t count, const std::vector<Vec3>& centroids) {
    Node node;
    node.first = first;
    node.count = count;
    for (int32_t i = first; i < first + count; ++i) {
        const Tri& t = tris_[static_cast<size_t>(order[static_cast<size_t>(i)])];
        node.box.expand(t.a);
        node.box.expand(t.a + t.e1);
        node.box.expand(t.a + t.e2);
    }
    const int32_t index = static_cast<int32_t>(nodes_.size());
    nodes_.push_back(node);
    if (count <= kLeafSize) return index;

    const Vec3 ext = node.box.extent();
    const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : ext.y >= ext.z ? 1 : 2;
    auto key = [&](int32_t ti) {
        const Vec3& c = centroids[static_cast<size_t>(ti)];
        return axis == 0 ? c.x : axis == 1 ? c.y : c.z;
    };
    const int32_t mid = first + count / 2;
    std::nth_element(order.begin() + first, order.begin() + mid,
                     order.begin() + first + count,
                     [&](int32_t lhs, int32_t rhs) { return key(lhs) < key(rhs); });

    const int32_t left = build_node(order, first, mid - first, centroids);
    const int32_t right = build_node(order, mid, first + count - mid, centroids);
    nodes_[static_cast<size_t>(index)].left = left;
    nodes_[static_cast<size_t>(index)].right = right;
    nodes_[static_cast<size_t>(index)].count = 0;
    return index;
}

std::optional<RayHit> AccelStructure::nearest(const Vec3& origin, const Vec3& dir,
                                              double t_min, double t_max) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv{1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z};

    double best_t = t_max;
    int32_t best_tri = -1;
    int32_t stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[static_cast<size_t>(stack[--sp])];
        if (!slab_hit(node.box, origin, inv, t_min, best_t)) continue;
        if (node.count > 0) {
            for (int32_t i = node.first; i < node.first + node.count; ++i) {
                const Tri& tr = tris_[static_cast<size_t>(i)];
                const double t = intersect_triangle(origin, dir, tr.a, tr.e1, tr.e2);
                if (t > t_min && t < best_t) {
                    best_t = t;
                    best_tri = i;
                }
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
        }
    }
    if (best_tri < 0) return std::nullopt;
    const Tri& tr = tris_[static_cast<size_t>(best_tri)];
    RayHit hit;
    hit.t = best_t;
    hit.point = origin + best_t * dir;
    hit.triangle = best_tri;
    hit.facet = tr.facet;
    hit.object_id = tr.object_id;
    return hit;
}

bool AccelStructure::segment_clear(const Vec3& a, const Vec3& b,
                                   double endpoint_clearance) const {
    const Vec3 d = b - a;
    const double len = d.norm();
    if (len <= 2.0 * endpoint_clearance) return true;
    const Vec3 u = d / len;
    return !nearest(a, u, endpoint_clearance, len - endpoint_clearance).has_value();
}

AccelStructure build_accel(const scene::Scene& scene) {
    AccelStructure accel;

    std::vector<const scene::TriangleMesh*> meshes;
    meshes.reserve(scene.meshes.size());
    for (const auto& m : scene.meshes) meshes.push_back(&m);

    std::vector<int32_t> triangle_facet;
    accel.facets_ = merge_facets(meshes, triangle_facet);
    accel.edges_ = extract_edges(scene);

    // Flatten triangles in scene order so the facet back-map lines up.
    std::vector<AccelStructure::Tri> flat;
    for (const auto& m : scene.meshes) {
        for (const auto& t : m.triangles) {
            AccelStructure::Tri tr;
            tr.a = m.vertices[static_cast<size_t>(t[0])];
            tr.e1 = m.vertices[static_cast<size_t>(t[1])] - tr.a;
            tr.e2 = m.vertices[static_cast<size_t>(t[2])] - tr.a;
            tr.object_id = m.object_id;
            flat.push_back(tr);
        }
    }
    for (size_t i = 0; i < flat.size(); ++i) flat[i].facet = triangle_facet[i];
    if (flat.empty()) return accel;

    std::vector<Vec3> centroids(flat.size());
    for (size_t i = 0; i < flat.size(); ++i)
        centroids[i] = flat[i].a + (flat[i].e1 + flat[i].e2) / 3.0;

    std::vector<int32_t> order(flat.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);

    accel.tris_ = flat; // placeholder sizing; reordered below
    accel.nodes_.reserve(2 * flat.size());
    accel.build_node(order, 0, static_cast<int32_t>(flat.size()), centroids);

    // The build permuted `order`; store triangles in traversal order.
    std::vector<AccelStructure::Tri> reordered(flat.size());
    for (size_t i = 0; i < order.size(); ++i) reordered[i] = flat[static_cast<size_t>(order[i])];
    accel.tris_ = std::move(reordered);
    return accel;
}

} // namespace gert::rt

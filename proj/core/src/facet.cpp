// SPDX-License-Identifier: Apache-2.0
#include "gert/rt/facet.hpp"

#include "gert/error.hpp"
#include "gert/scene/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>

namespace gert::rt {

namespace {

constexpr double kNormalAgreement = 1e-9;
constexpr double kPi = 3.14159265358979323846;

/// Convex hull of 2D points (monotone chain), counter-clockwise, no
/// duplicate endpoint. Collinear input degenerates to its two extremes.
std::vector<std::pair<double, double>> hull2d(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const size_t n = pts.size();
    if (n < 3) return pts;
    auto cross2 = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                     const std::pair<double, double>& b) {
        return (a.first - o.first) * (b.second - o.second) -
               (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    for (size_t i = n - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross2(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

/// Outward normal of a counter-clockwise footprint edge with direction d.
Vec3 wall_outward(const Vec3& d_unit) {
    return Vec3{d_unit.y, -d_unit.x, 0.0};
}

} // namespace

bool same_plane(const Facet& a, const Facet& b) {
    const double c = a.normal.dot(b.normal);
    if (std::abs(c) < 1.0 - 1e-9) return false;
    const double d_other = c > 0.0 ? b.plane_d : -b.plane_d;
    return std::abs(a.plane_d - d_other) <= 1e-6;
}

std::vector<Facet> merge_facets(const std::vector<const scene::TriangleMesh*>& meshes,
                                std::vector<int32_t>& triangle_facet) {
    std::vector<Facet> facets;
    triangle_facet.clear();

    int32_t global_base = 0;
    for (const scene::TriangleMesh* mesh : meshes) {
        const auto& tris = mesh->triangles;
        const int32_t n = static_cast<int32_t>(tris.size());

        std::vector<Vec3> normals(static_cast<size_t>(n));
        for (int32_t t = 0; t < n; ++t) normals[static_cast<size_t>(t)] = mesh->triangle_normal(static_cast<size_t>(t));

        // Edge (vertex-index pair) -> triangles that use it.
        std::map<std::pair<int32_t, int32_t>, std::vector<int32_t>> edge_users;
        for (int32_t t = 0; t < n; ++t) {
            for (int e = 0; e < 3; ++e) {
                int32_t u = tris[static_cast<size_t>(t)][static_cast<size_t>(e)];
                int32_t v = tris[static_cast<size_t>(t)][static_cast<size_t>((e + 1) % 3)];
                if (u > v) std::swap(u, v);
                edge_users[{u, v}].push_back(t);
            }
        }

        // Flood-fill groups of edge-adjacent triangles with agreeing normals.
        std::vector<int32_t> group(static_cast<size_t>(n), -1);
        for (int32_t seed = 0; seed < n; ++seed) {
            if (group[static_cast<size_t>(seed)] >= 0) continue;
            const int32_t fid = static_cast<int32_t>(facets.size());
            std::vector<int32_t> stack{seed};
            group[static_cast<size_t>(seed)] = fid;
            Facet f;
            f.object_id = mesh->object_id;
            f.normal = normals[static_cast<size_t>(seed)];
            f.plane_d = f.normal.dot(mesh->vertices[static_cast<size_t>(tris[static_cast<size_t>(seed)][0])]);
            while (!stack.empty()) {
                const int32_t t = stack.back();
                stack.pop_back();
                f.triangles.push_back(global_base + t);
                for (int e = 0; e < 3; ++e) {
                    int32_t u = tris[static_cast<size_t>(t)][static_cast<size_t>(e)];
                    int32_t v = tris[static_cast<size_t>(t)][static_cast<size_t>((e + 1) % 3)];
                    if (u > v) std::swap(u, v);
                    for (int32_t other : edge_users[{u, v}]) {
                        if (group[static_cast<size_t>(other)] >= 0) continue;
                        if (normals[static_cast<size_t>(other)].dot(f.normal) < 1.0 - kNormalAgreement) continue;
                        group[static_cast<size_t>(other)] = fid;
                        stack.push_back(other);
                    }
                }
            }
            facets.push_back(std::move(f));
        }

        triangle_facet.resize(static_cast<size_t>(global_base + n));
        for (int32_t t = 0; t < n; ++t)
            triangle_facet[static_cast<size_t>(global_base + t)] = group[static_cast<size_t>(t)];
        global_base += n;
    }

    // In-plane hulls and bounding boxes.
    // Collect each facet's vertices from its triangles.
    std::vector<std::vector<Vec3>> verts(facets.size());
    {
        int32_t base = 0;
        for (const scene::TriangleMesh* mesh : meshes) {
            const int32_t n = static_cast<int32_t>(mesh->triangles.size());
            for (int32_t t = 0; t < n; ++t) {
                const int32_t fid = triangle_facet[static_cast<size_t>(base + t)];
                for (int c = 0; c < 3; ++c)
                    verts[static_cast<size_t>(fid)].push_back(
                        mesh->vertices[static_cast<size_t>(mesh->triangles[static_cast<size_t>(t)][static_cast<size_t>(c)])]);
            }
            base += n;
        }
    }
    for (size_t fi = 0; fi < facets.size(); ++fi) {
        Facet& f = facets[fi];
        for (const Vec3& p : verts[fi]) f.box.expand(p);

        // In-plane orthonormal basis.
        const Vec3 ref = std::abs(f.normal.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
        const Vec3 u = cross(ref, f.normal).normalized();
        const Vec3 v = cross(f.normal, u);
        const Vec3 origin = verts[fi].front();
        std::vector<std::pair<double, double>> p2;
        p2.reserve(verts[fi].size());
        for (const Vec3& p : verts[fi]) p2.emplace_back(u.dot(p - origin), v.dot(p - origin));
        for (const auto& [a, b] : hull2d(std::move(p2)))
            f.hull.push_back(origin + a * u + b * v);
    }
    return facets;
}

double DiffractionEdge::azimuth(const Vec3& v) const {
    const Vec3 perp = v - v.dot(direction) * direction;
    double a = std::atan2(perp.dot(normal_o), perp.dot(tangent_o));
    if (a < 0.0) a += 2.0 * kPi;
    return a;
}

std::vector<DiffractionEdge> extract_edges(const scene::Scene& scene) {
    std::vector<DiffractionEdge> edges;
    for (const auto& [id, info] : scene.buildings) {
        const auto& ring = info.footprint.outer_ring;
        const size_t m = ring.size();
        if (m < 3 || info.height_m <= 0.0) continue;
        const double z_top = info.base_elevation_m + info.height_m;

        for (size_t i = 0; i < m; ++i) {
            const geo::Point2& p0 = ring[i];
            const geo::Point2& p1 = ring[(i + 1) % m];
            const geo::Point2& pm = ring[(i + m - 1) % m];

            const Vec3 d_next = Vec3{p1.x - p0.x, p1.y - p0.y, 0.0}.normalized();
            const Vec3 d_prev = Vec3{p0.x - pm.x, p0.y - pm.y, 0.0}.normalized();

            // Roof rim over side i -> i+1. The o-face is the wall below the
            // edge (tangent straight down); a quarter-turn exterior gives
            // n = 3/2.
            {
                DiffractionEdge e;
                e.object_id = id;
                e.a = Vec3{p0.x, p0.y, z_top};
                e.b = Vec3{p1.x, p1.y, z_top};
                e.tangent_o = Vec3{0.0, 0.0, -1.0};
                e.normal_o = wall_outward(d_next);
                e.direction = cross(e.tangent_o, e.normal_o);
                if (e.direction.dot(e.b - e.a) < 0.0) std::swap(e.a, e.b);
                e.n_index = 1.5;
                e.vertical = false;
                edges.push_back(e);
            }

            // Vertical edge at corner i, kept only when the footprint turns
            // left (convex corner of the solid): exterior angle pi + turn.
            const double turn = std::atan2(d_prev.x * d_next.y - d_prev.y * d_next.x,
                                           d_prev.dot(d_next));
            if (turn > 1e-9) {
                DiffractionEdge e;
                e.object_id = id;
                e.a = Vec3{p0.x, p0.y, info.base_elevation_m};
                e.b = Vec3{p0.x, p0.y, z_top};
                e.tangent_o = d_next;               // along the outgoing wall
                e.normal_o = wall_outward(d_next);
                e.direction = cross(e.tangent_o, e.normal_o); // -z
                if (e.direction.dot(e.b - e.a) < 0.0) std::swap(e.a, e.b);
                e.n_index = 1.0 + turn / kPi;
                e.vertical = true;
                edges.push_back(e);
            }
        }
    }
    return edges;
}

} // namespace gert::rt

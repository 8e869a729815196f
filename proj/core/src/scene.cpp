// SPDX-License-Identifier: Apache-2.0
#include "gert/scene/scene.hpp"

#include "gert/error.hpp"
#include "gert/scene/triangulate.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gert::scene {

namespace {
constexpr double kMinTriangleArea = 1e-6; // m^2
}

double TriangleMesh::triangle_area(size_t t) const {
    const auto& tri = triangles[t];
    const Vec3& a = vertices[tri[0]];
    const Vec3& b = vertices[tri[1]];
    const Vec3& c = vertices[tri[2]];
    return 0.5 * cross(b - a, c - a).norm();
}

Vec3 TriangleMesh::triangle_normal(size_t t) const {
    const auto& tri = triangles[t];
    const Vec3& a = vertices[tri[0]];
    const Vec3& b = vertices[tri[1]];
    const Vec3& c = vertices[tri[2]];
    return cross(b - a, c - a).normalized();
}

void TriangleMesh::validate() const {
    const auto nv = static_cast<std::int32_t>(vertices.size());
    for (size_t t = 0; t < triangles.size(); ++t) {
        for (const std::int32_t i : triangles[t]) {
            if (i < 0 || i >= nv) {
                throw GeometryError("mesh (object " + std::to_string(object_id) +
                                    "): vertex index out of range");
            }
        }
        if (triangle_area(t) < kMinTriangleArea) {
            throw GeometryError("mesh (object " + std::to_string(object_id) +
                                "): triangle " + std::to_string(t) +
                                " is below the minimum area");
        }
    }
}

const TriangleMesh* Scene::mesh_for(std::int64_t object_id) const {
    for (const TriangleMesh& m : meshes) {
        if (m.object_id == object_id) return &m;
    }
    return nullptr;
}

TriangleMesh* Scene::mesh_for(std::int64_t object_id) {
    for (TriangleMesh& m : meshes) {
        if (m.object_id == object_id) return &m;
    }
    return nullptr;
}

void Scene::validate() const {
    if (!(frequency_hz > 0)) throw GeometryError("scene frequency must be positive");
    int terrain_count = 0;
    std::map<std::int64_t, int> seen;
    for (const TriangleMesh& m : meshes) {
        m.validate();
        if (++seen[m.object_id] > 1) {
            throw GeometryError("duplicate object id " + std::to_string(m.object_id));
        }
        if (m.object_kind == ObjectKind::terrain) {
            ++terrain_count;
        } else {
            if (!materials.count(m.object_id)) {
                throw GeometryError("building " + std::to_string(m.object_id) +
                                    " has no material");
            }
            if (!buildings.count(m.object_id)) {
                throw GeometryError("building " + std::to_string(m.object_id) +
                                    " has no metadata entry");
            }
        }
    }
    if (terrain_count != 1) {
        // A scene with no geometry at all is valid: free-space tracing.
        if (meshes.empty() && buildings.empty()) return;
        throw GeometryError("scene must contain exactly one terrain mesh, got " +
                            std::to_string(terrain_count));
    }
}

TriangleMesh build_terrain_mesh(const geo::TerrainGrid& terrain) {
    if (terrain.nrows < 2 || terrain.ncols < 2 || terrain.cell_size_m <= 0) {
        throw GeometryError("terrain grid must be at least 2x2 with positive spacing");
    }
    TriangleMesh mesh;
    mesh.object_id = 0;
    mesh.object_kind = ObjectKind::terrain;
    mesh.vertices.reserve(static_cast<size_t>(terrain.nrows) * terrain.ncols);
    for (int i = 0; i < terrain.nrows; ++i) {
        for (int j = 0; j < terrain.ncols; ++j) {
            mesh.vertices.push_back({terrain.x0 + (j + 0.5) * terrain.cell_size_m,
                                     terrain.y0 + (i + 0.5) * terrain.cell_size_m,
                                     terrain.at(i, j)});
        }
    }
    mesh.triangles.reserve(static_cast<size_t>(terrain.nrows - 1) * (terrain.ncols - 1) * 2);
    auto vid = [&](int i, int j) { return static_cast<std::int32_t>(i * terrain.ncols + j); };
    for (int i = 0; i + 1 < terrain.nrows; ++i) {
        for (int j = 0; j + 1 < terrain.ncols; ++j) {
            // CCW seen from above (+z normals)
            mesh.triangles.push_back({vid(i, j), vid(i, j + 1), vid(i + 1, j + 1)});
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i + 1, j)});
        }
    }
    return mesh;
}

TriangleMesh extrude_building(const geo::BuildingFootprint& fp,
                              const geo::TerrainGrid& terrain) {
    if (!(fp.height_m > 0)) {
        throw GeometryError("building " + std::to_string(fp.id) +
                            ": height must be positive");
    }
    const size_t n = fp.outer_ring.size();
    if (n < 3) {
        throw GeometryError("building " + std::to_string(fp.id) +
                            ": footprint needs at least 3 vertices");
    }
    double base = std::numeric_limits<double>::infinity();
    for (const geo::Point2& p : fp.outer_ring) {
        if (p.x < terrain.x_min() || p.x > terrain.x_max() ||
            p.y < terrain.y_min() || p.y > terrain.y_max()) {
            throw GeometryError("building " + std::to_string(fp.id) +
                                ": footprint outside the terrain extent");
        }
        base = std::min(base, terrain.sample(p.x, p.y));
    }

    TriangleMesh mesh;
    mesh.object_id = fp.id;
    mesh.object_kind = ObjectKind::building;
    mesh.vertices.reserve(2 * n);
    for (const geo::Point2& p : fp.outer_ring) mesh.vertices.push_back({p.x, p.y, base});
    const double roof_z = base + fp.height_m;
    for (const geo::Point2& p : fp.outer_ring) mesh.vertices.push_back({p.x, p.y, roof_z});

    mesh.triangles.reserve(2 * n + (n - 2));
    const auto ni = static_cast<std::int32_t>(n);
    for (std::int32_t i = 0; i < ni; ++i) {
        const std::int32_t j = (i + 1) % ni;
        // Outward-facing for a CCW footprint.
        mesh.triangles.push_back({i, j, ni + j});
        mesh.triangles.push_back({i, ni + j, ni + i});
    }
    for (const auto& tri : triangulate_polygon(fp.outer_ring)) {
        mesh.triangles.push_back({ni + tri[0], ni + tri[1], ni + tri[2]});
    }
    return mesh;
}

Scene assemble_scene(const std::vector<geo::BuildingFootprint>& footprints,
                     const geo::TerrainGrid& terrain,
                     const MaterialPolicy& policy,
                     double frequency_hz,
                     double origin_lat,
                     double origin_lon) {
    if (!(frequency_hz > 0)) throw GeometryError("scene frequency must be positive");
    const em::MaterialTable& table =
        policy.table ? *policy.table : em::MaterialTable::builtin();

    // The scene stores materials resolved at the scene frequency without
    // the frequency law, so later material perturbations act on the
    // resolved values directly.
    auto resolve_flat = [&](const std::string& name) {
        em::Material m = table.resolve(name, frequency_hz);
        m.law.reset();
        return m;
    };

    Scene s;
    s.frequency_hz = frequency_hz;
    s.origin_lat = origin_lat;
    s.origin_lon = origin_lon;
    s.meshes.push_back(build_terrain_mesh(terrain));
    s.materials[0] = resolve_flat(policy.ground_material);

    for (const geo::BuildingFootprint& fp : footprints) {
        if (fp.id <= 0) {
            throw GeometryError("building footprint ids must be positive (got " +
                                std::to_string(fp.id) + ")");
        }
        s.meshes.push_back(extrude_building(fp, terrain));
        const auto ov = policy.overrides.find(fp.id);
        s.materials[fp.id] =
            resolve_flat(ov != policy.overrides.end() ? ov->second : policy.building_material);
        BuildingInfo info;
        info.base_elevation_m = s.meshes.back().vertices.front().z;
        info.height_m = fp.height_m;
        info.footprint = fp;
        s.buildings[fp.id] = std::move(info);
    }
    s.validate();
    return s;
}

} // namespace gert::scene

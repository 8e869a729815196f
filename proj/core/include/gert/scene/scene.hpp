// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/em/material.hpp"
#include "gert/geo/geo_types.hpp"
#include "gert/vec3.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gert::scene {

enum class ObjectKind { terrain, building };

/// One object's triangle soup. Triangles are wound so their normals point
/// out of the object (up for terrain and roofs, outward for walls).
struct TriangleMesh {
    std::int64_t object_id = 0;
    ObjectKind object_kind = ObjectKind::terrain;
    std::vector<Vec3> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;

    double triangle_area(size_t t) const;
    Vec3 triangle_normal(size_t t) const; // unit length

    /// Index ranges and a minimum triangle area of 1e-6 m^2.
    void validate() const;
};

/// Perturbable metadata kept alongside a building's mesh.
struct BuildingInfo {
    double base_elevation_m = 0.0;
    double height_m = 0.0;
    geo::BuildingFootprint footprint; // ring in the local frame
};

/// The world model: terrain plus extruded buildings, each with a resolved
/// material. Immutable once assembled; perturbation copies it.
struct Scene {
    double frequency_hz = 3.5e9;
    double origin_lat = 0.0;
    double origin_lon = 0.0;
    std::vector<TriangleMesh> meshes; // terrain first
    std::map<std::int64_t, em::Material> materials;
    std::map<std::int64_t, BuildingInfo> buildings;

    const TriangleMesh* mesh_for(std::int64_t object_id) const;
    TriangleMesh* mesh_for(std::int64_t object_id);

    /// Terrain present and unique, all buildings material-tagged,
    /// frequency positive, per-mesh invariants.
    void validate() const;
};

/// Material assignment: defaults for ground/buildings plus per-building
/// overrides by object id. Names resolve against `table` (built-in ITU set
/// when null) at the scene frequency.
struct MaterialPolicy {
    std::string building_material = "itu_concrete";
    std::string ground_material = "itu_medium_dry_ground";
    std::map<std::int64_t, std::string> overrides;
    const em::MaterialTable* table = nullptr;
};

/// Terrain surface as a mesh over the sample lattice: one vertex per grid
/// sample (z exactly the sample value), two triangles per lattice cell.
TriangleMesh build_terrain_mesh(const geo::TerrainGrid& terrain);

/// Prism extrusion: base at the minimum bilinear terrain sample under the
/// footprint vertices, walls of two triangles per ring edge, ear-clipped
/// flat roof, no floor face. 2n vertices for an n-vertex footprint.
TriangleMesh extrude_building(const geo::BuildingFootprint& fp,
                              const geo::TerrainGrid& terrain);

/// Terrain mesh (object id 0) plus one extruded building per footprint,
/// with materials resolved at frequency_hz. Building object ids are the
/// footprint ids (must be positive).
Scene assemble_scene(const std::vector<geo::BuildingFootprint>& footprints,
                     const geo::TerrainGrid& terrain,
                     const MaterialPolicy& policy,
                     double frequency_hz,
                     double origin_lat = 0.0,
                     double origin_lon = 0.0);

} // namespace gert::scene

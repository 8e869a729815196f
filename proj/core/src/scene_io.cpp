// SPDX-License-Identifier: Apache-2.0
#include "gert/scene/scene_io.hpp"

#include "gert/config/toml.hpp"
#include "gert/error.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace gert::scene {

namespace {

namespace fs = std::filesystem;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* kind_name(ObjectKind k) {
    return k == ObjectKind::terrain ? "terrain" : "building";
}

const char* height_source_name(geo::HeightSource s) {
    switch (s) {
        case geo::HeightSource::explicit_value: return "explicit";
        case geo::HeightSource::levels_rule: return "levels";
        case geo::HeightSource::default_rule: return "default";
    }
    return "default";
}

geo::HeightSource height_source_from(const std::string& s) {
    if (s == "explicit") return geo::HeightSource::explicit_value;
    if (s == "levels") return geo::HeightSource::levels_rule;
    if (s == "default") return geo::HeightSource::default_rule;
    throw ParseError("scene manifest: unknown height_source '" + s + "'");
}

// ------------------------------------------------------------------ PLY

void write_ply(const TriangleMesh& mesh, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write mesh file: " + file.string());
    std::ostringstream header;
    header << "ply\n"
           << "format binary_little_endian 1.0\n"
           << "element vertex " << mesh.vertices.size() << "\n"
           << "property double x\n"
           << "property double y\n"
           << "property double z\n"
           << "element face " << mesh.triangles.size() << "\n"
           << "property list uchar int vertex_indices\n"
           << "end_header\n";
    out << header.str();
    for (const Vec3& v : mesh.vertices) {
        const double xyz[3] = {v.x, v.y, v.z};
        out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    }
    for (const auto& tri : mesh.triangles) {
        const unsigned char count = 3;
        out.write(reinterpret_cast<const char*>(&count), 1);
        out.write(reinterpret_cast<const char*>(tri.data()), 3 * sizeof(std::int32_t));
    }
    if (!out) throw IoError("failed writing mesh file: " + file.string());
}

void read_ply(const fs::path& file, TriangleMesh& mesh) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("mesh file not found: " + file.string());

    std::string line;
    size_t n_vertices = 0, n_faces = 0;
    bool saw_magic = false, saw_format = false, in_vertex = false;
    int vertex_props = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!saw_magic) {
            if (line != "ply") throw ParseError(file.string() + ": not a PLY file");
            saw_magic = true;
            continue;
        }
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "comment") continue;
        if (word == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "binary_little_endian") {
                throw ParseError(file.string() + ": unsupported PLY format '" + fmt + "'");
            }
            saw_format = true;
        } else if (word == "element") {
            std::string what;
            size_t count = 0;
            ls >> what >> count;
            if (what == "vertex") {
                n_vertices = count;
                in_vertex = true;
            } else if (what == "face") {
                n_faces = count;
                in_vertex = false;
            } else {
                throw ParseError(file.string() + ": unsupported PLY element '" + what + "'");
            }
        } else if (word == "property") {
            std::string type;
            ls >> type;
            if (in_vertex) {
                if (type != "double" && type != "float64") {
                    throw ParseError(file.string() + ": vertex properties must be double");
                }
                ++vertex_props;
            }
        } else if (word == "end_header") {
            break;
        } else {
            throw ParseError(file.string() + ": unexpected PLY header line '" + line + "'");
        }
    }
    if (!saw_format || vertex_props != 3) {
        throw ParseError(file.string() + ": PLY header is not the expected x,y,z double schema");
    }

    mesh.vertices.resize(n_vertices);
    for (size_t i = 0; i < n_vertices; ++i) {
        double xyz[3];
        if (!in.read(reinterpret_cast<char*>(xyz), sizeof(xyz))) {
            throw ParseError(file.string() + ": truncated vertex data");
        }
        mesh.vertices[i] = {xyz[0], xyz[1], xyz[2]};
    }
    mesh.triangles.resize(n_faces);
    for (size_t t = 0; t < n_faces; ++t) {
        unsigned char count = 0;
        if (!in.read(reinterpret_cast<char*>(&count), 1) || count != 3) {
            throw ParseError(file.string() + ": non-triangular or truncated face");
        }
        std::int32_t idx[3];
        if (!in.read(reinterpret_cast<char*>(idx), sizeof(idx))) {
            throw ParseError(file.string() + ": truncated face data");
        }
        for (const std::int32_t i : idx) {
            if (i < 0 || static_cast<size_t>(i) >= n_vertices) {
                throw ParseError(file.string() + ": vertex index out of range");
            }
        }
        mesh.triangles[t] = {idx[0], idx[1], idx[2]};
    }
}

void reject_unknown_keys(const config::TomlTable& table,
                         const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : table.values) {
        if (!allowed.count(key)) {
            throw ParseError("scene manifest: unknown key '" + key + "' in " + where);
        }
    }
}

} // namespace

void export_scene(const Scene& s, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create scene directory: " + dir.string());

    std::string manifest;
    manifest += "[scene]\n";
    manifest += "frequency_hz = " + fmt_double(s.frequency_hz) + "\n";
    manifest += "origin_lat = " + fmt_double(s.origin_lat) + "\n";
    manifest += "origin_lon = " + fmt_double(s.origin_lon) + "\n";

    for (const TriangleMesh& mesh : s.meshes) {
        const std::string mesh_file = "mesh_" + std::to_string(mesh.object_id) + ".ply";
        write_ply(mesh, dir / mesh_file);

        const auto mat = s.materials.find(mesh.object_id);
        if (mat == s.materials.end()) {
            throw GeometryError("object " + std::to_string(mesh.object_id) +
                                " has no material to export");
        }
        manifest += "\n[[object]]\n";
        manifest += "id = " + std::to_string(mesh.object_id) + "\n";
        manifest += std::string("kind = \"") + kind_name(mesh.object_kind) + "\"\n";
        manifest += "mesh_file = \"" + mesh_file + "\"\n";
        manifest += "material = \"" + mat->second.name + "\"\n";
        manifest += "eps_r = " + fmt_double(mat->second.eps_r) + "\n";
        manifest += "sigma_s_per_m = " + fmt_double(mat->second.sigma_s_per_m) + "\n";
        if (mesh.object_kind == ObjectKind::building) {
            const auto b = s.buildings.find(mesh.object_id);
            if (b == s.buildings.end()) {
                throw GeometryError("building " + std::to_string(mesh.object_id) +
                                    " has no metadata to export");
            }
            manifest += "base_elevation_m = " + fmt_double(b->second.base_elevation_m) + "\n";
            manifest += "height_m = " + fmt_double(b->second.height_m) + "\n";
            manifest += std::string("height_source = \"") +
                        height_source_name(b->second.footprint.height_source) + "\"\n";
            manifest += "footprint = [";
            const auto& ring = b->second.footprint.outer_ring;
            for (size_t i = 0; i < ring.size(); ++i) {
                if (i) manifest += ", ";
                manifest += "[" + fmt_double(ring[i].x) + ", " + fmt_double(ring[i].y) + "]";
            }
            manifest += "]\n";
        }
    }

    const fs::path manifest_path = dir / "scene.toml";
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw IoError("cannot write scene manifest: " + manifest_path.string());
    out << manifest;
    if (!out) throw IoError("failed writing scene manifest: " + manifest_path.string());
}

Scene import_scene(const fs::path& dir) {
    const fs::path manifest_path = dir / "scene.toml";
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw IoError("scene manifest not found: " + manifest_path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();

    const config::TomlDocument doc = config::parse_toml(buffer.str());
    const config::TomlTable* scene_table = doc.find_table("scene");
    if (!scene_table) throw ParseError("scene manifest: missing [scene] section");
    reject_unknown_keys(*scene_table, {"frequency_hz", "origin_lat", "origin_lon"}, "[scene]");

    Scene s;
    s.frequency_hz = scene_table->number("frequency_hz");
    s.origin_lat = scene_table->number("origin_lat");
    s.origin_lon = scene_table->number("origin_lon");

    // A manifest with no [[object]] sections is the empty free-space scene;
    // Scene::validate still rejects any partially-formed geometry.
    static const std::vector<config::TomlTable> kNoObjects;
    const auto objects_it = doc.table_arrays.find("object");
    const std::vector<config::TomlTable>& object_tables =
        objects_it == doc.table_arrays.end() ? kNoObjects : objects_it->second;

    static const std::set<std::string> kCommonKeys = {
        "id", "kind", "mesh_file", "material", "eps_r", "sigma_s_per_m"};
    static const std::set<std::string> kBuildingKeys = {
        "id", "kind", "mesh_file", "material", "eps_r", "sigma_s_per_m",
        "base_elevation_m", "height_m", "height_source", "footprint"};

    for (const config::TomlTable& obj : object_tables) {
        const std::string kind = obj.string("kind");
        const auto id = static_cast<std::int64_t>(obj.number("id"));

        TriangleMesh mesh;
        mesh.object_id = id;
        if (kind == "terrain") {
            reject_unknown_keys(obj, kCommonKeys, "[[object]] " + std::to_string(id));
            mesh.object_kind = ObjectKind::terrain;
        } else if (kind == "building") {
            reject_unknown_keys(obj, kBuildingKeys, "[[object]] " + std::to_string(id));
            mesh.object_kind = ObjectKind::building;
        } else {
            throw ParseError("scene manifest: unknown object kind '" + kind + "'");
        }

        read_ply(dir / obj.string("mesh_file"), mesh);

        em::Material material;
        material.name = obj.string("material");
        material.eps_r = obj.number("eps_r");
        material.sigma_s_per_m = obj.number("sigma_s_per_m");
        s.materials[id] = std::move(material);

        if (mesh.object_kind == ObjectKind::building) {
            BuildingInfo info;
            info.base_elevation_m = obj.number("base_elevation_m");
            info.height_m = obj.number("height_m");
            info.footprint.id = id;
            info.footprint.height_m = info.height_m;
            info.footprint.height_source = height_source_from(obj.string("height_source"));
            const config::TomlValue& ring = obj.get("footprint");
            if (!ring.is_array()) throw ParseError("scene manifest: footprint must be an array");
            for (const config::TomlValue& pt : ring.array) {
                if (!pt.is_array() || pt.array.size() != 2 ||
                    !pt.array[0].is_number() || !pt.array[1].is_number()) {
                    throw ParseError("scene manifest: footprint entries must be [x, y]");
                }
                info.footprint.outer_ring.push_back({pt.array[0].num, pt.array[1].num});
            }
            if (info.footprint.outer_ring.size() != mesh.vertices.size() / 2) {
                throw ParseError("scene manifest: footprint size does not match mesh " +
                                 std::to_string(id));
            }
            s.buildings[id] = std::move(info);
        }
        s.meshes.push_back(std::move(mesh));
    }

    s.validate();
    return s;
}

} // namespace gert::scene

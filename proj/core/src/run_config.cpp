// SPDX-License-Identifier: Apache-2.0
#include "gert/config/run_config.hpp"

#include "gert/config/toml.hpp"
#include "gert/error.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gert::config {

namespace {

namespace fs = std::filesystem;

// Largest integer a config number (stored as a double) can carry exactly.
constexpr double kMaxExactInt = 9007199254740992.0; // 2^53

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '\\' || c == '"') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

[[noreturn]] void fail(const std::string& message) {
    throw ParseError("run configuration: " + message);
}

void reject_unknown(const TomlTable& table, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, value] : table.values)
        if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
}

long long int_in(const TomlTable& table, const std::string& key,
                 const std::string& where, long long lo, long long hi,
                 long long fallback) {
    if (!table.has(key)) return fallback;
    const double v = table.number(key);
    if (!(v >= static_cast<double>(lo)) || !(v <= static_cast<double>(hi)) ||
        v != std::floor(v) || std::abs(v) > kMaxExactInt)
        fail("key '" + key + "' in " + where + " must be an integer in [" +
             std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<long long>(v);
}

double positive_number(const TomlTable& table, const std::string& key,
                       const std::string& where, double fallback) {
    const double v = table.number_or(key, fallback);
    if (!(v > 0) || !std::isfinite(v))
        fail("key '" + key + "' in " + where + " must be a positive number");
    return v;
}

double nonnegative_number(const TomlTable& table, const std::string& key,
                          const std::string& where, double fallback) {
    const double v = table.number_or(key, fallback);
    if (!(v >= 0) || !std::isfinite(v))
        fail("key '" + key + "' in " + where + " must be a non-negative number");
    return v;
}

std::string resolve_path(const std::string& p, const fs::path& base_dir) {
    if (p.empty()) return p;
    return fs::absolute(base_dir / p).lexically_normal().string();
}

void parse_scene(const TomlTable& t, const fs::path& base_dir, SceneInput& s) {
    static const std::set<std::string> kKeys = {
        "scene_dir",      "footprints",       "terrain",
        "lat_min",        "lat_max",          "lon_min",
        "lon_max",        "origin_lat",       "origin_lon",
        "building_material", "ground_material", "meters_per_level",
        "default_height_m",  "label"};
    reject_unknown(t, kKeys, "[scene]");

    s.scene_dir = resolve_path(t.string_or("scene_dir", ""), base_dir);
    s.footprints_path = resolve_path(t.string_or("footprints", ""), base_dir);
    s.terrain_path = resolve_path(t.string_or("terrain", ""), base_dir);
    s.building_material = t.string_or("building_material", s.building_material);
    s.ground_material = t.string_or("ground_material", s.ground_material);
    s.meters_per_level =
        positive_number(t, "meters_per_level", "[scene]", s.meters_per_level);
    s.default_height_m =
        positive_number(t, "default_height_m", "[scene]", s.default_height_m);
    s.label = t.string_or("label", s.label);
    if (s.label.empty()) fail("key 'label' in [scene] must not be empty");

    const std::array<const char*, 4> corners = {"lat_min", "lat_max", "lon_min",
                                                "lon_max"};
    int have = 0;
    for (const char* key : corners) have += t.has(key) ? 1 : 0;
    if (have != 0 && have != 4)
        fail("[scene] needs all four of lat_min/lat_max/lon_min/lon_max "
             "or none");
    if (t.has("origin_lat") != t.has("origin_lon"))
        fail("[scene] origin_lat and origin_lon must be given together");
    if (have == 4) {
        geo::GeoRegion region;
        try {
            region = geo::GeoRegion::from_corners(
                t.number("lat_min"), t.number("lat_max"), t.number("lon_min"),
                t.number("lon_max"));
            if (t.has("origin_lat")) {
                region.origin_lat = t.number("origin_lat");
                region.origin_lon = t.number("origin_lon");
                region.validate();
            }
        } catch (const Error& e) {
            fail(std::string("[scene] region is invalid: ") + e.what());
        }
        s.region = region;
    } else if (t.has("origin_lat")) {
        fail("[scene] origin coordinates need a region");
    }

    const bool raw_files =
        !s.footprints_path.empty() || !s.terrain_path.empty();
    if (!s.scene_dir.empty() && (raw_files || s.region.has_value()))
        fail("[scene] is either a scene_dir or footprints/terrain/region "
             "inputs, not both");
    if (raw_files) {
        if (s.footprints_path.empty())
            fail("[scene] raw inputs need a footprints path");
        if (s.terrain_path.empty()) fail("[scene] raw inputs need a terrain path");
        if (!s.region) fail("[scene] raw inputs need a region");
    }
    // A region with no input files is valid: it is all the fetch command
    // needs, and build/sweep check for their inputs themselves.
}

TxPlacement parse_tx(const TomlTable& t, size_t index) {
    const std::string where = "[[tx]] entry " + std::to_string(index + 1);
    static const std::set<std::string> kKeys = {"x",   "y",   "z",
                                                "lat", "lon", "height_agl_m"};
    reject_unknown(t, kKeys, where);

    const bool local = t.has("x") || t.has("y") || t.has("z");
    const bool geo = t.has("lat") || t.has("lon") || t.has("height_agl_m");
    if (local == geo)
        fail(where + " needs exactly one of x/y/z or lat/lon/height_agl_m");

    TxPlacement tx;
    if (local) {
        if (!t.has("x") || !t.has("y") || !t.has("z"))
            fail(where + " needs all of x, y and z");
        tx.x = t.number("x");
        tx.y = t.number("y");
        tx.z = t.number("z");
    } else {
        if (!t.has("lat") || !t.has("lon") || !t.has("height_agl_m"))
            fail(where + " needs all of lat, lon and height_agl_m");
        tx.geographic = true;
        tx.lat = t.number("lat");
        tx.lon = t.number("lon");
        tx.height_agl_m = t.number("height_agl_m");
        if (!(tx.height_agl_m > 0))
            fail(where + ": height_agl_m must be positive");
    }
    return tx;
}

perturb::PerturbationSpec parse_perturbation(const TomlTable& t, size_t index) {
    const std::string where = "[[perturbation]] entry " + std::to_string(index + 1);
    static const std::set<std::string> kKeys = {
        "kind", "sigma_height_m", "sigma_position_m", "material_fraction",
        "per_vertex"};
    reject_unknown(t, kKeys, where);
    if (!t.has("kind")) fail(where + " needs a kind");

    perturb::PerturbationSpec spec;
    spec.kind = perturb_kind_from(t.string("kind"));
    spec.sigma_height_m =
        nonnegative_number(t, "sigma_height_m", where, spec.sigma_height_m);
    spec.sigma_pos_m =
        nonnegative_number(t, "sigma_position_m", where, spec.sigma_pos_m);
    spec.material_rel_sigma =
        nonnegative_number(t, "material_fraction", where, spec.material_rel_sigma);
    spec.per_vertex = t.boolean_or("per_vertex", false);
    return spec;
}

fetch::FetchSource parse_source(const TomlTable& t, size_t index) {
    const std::string where = "[[source]] entry " + std::to_string(index + 1);
    static const std::set<std::string> kKeys = {"kind", "endpoint", "timeout_s",
                                                "retry_count"};
    reject_unknown(t, kKeys, where);
    if (!t.has("kind")) fail(where + " needs a kind");
    if (!t.has("endpoint")) fail(where + " needs an endpoint");

    fetch::FetchSource src;
    src.kind = source_kind_from(t.string("kind"));
    src.endpoint = t.string("endpoint");
    src.timeout_s = positive_number(t, "timeout_s", where, src.timeout_s);
    src.retry_count =
        static_cast<int>(int_in(t, "retry_count", where, 0, 5, src.retry_count));
    try {
        src.validate();
    } catch (const Error& e) {
        fail(where + " is invalid: " + e.what());
    }
    return src;
}

} // namespace

perturb::PerturbKind perturb_kind_from(std::string_view name) {
    if (name == "material") return perturb::PerturbKind::material;
    if (name == "position") return perturb::PerturbKind::position;
    if (name == "height") return perturb::PerturbKind::height;
    if (name == "height_position") return perturb::PerturbKind::height_position;
    if (name == "all") return perturb::PerturbKind::all;
    fail("unknown perturbation kind '" + std::string(name) +
         "' (expected material, position, height, height_position or all)");
}

fetch::SourceKind source_kind_from(std::string_view name) {
    if (name == "osm_overpass") return fetch::SourceKind::osm_overpass;
    if (name == "ms_footprints") return fetch::SourceKind::ms_footprints;
    if (name == "usgs_dem") return fetch::SourceKind::usgs_dem;
    fail("unknown source kind '" + std::string(name) +
         "' (expected osm_overpass, ms_footprints or usgs_dem)");
}

void RunConfig::set_seed(std::uint64_t seed) {
    master_seed = seed;
    for (perturb::PerturbationSpec& spec : perturbations)
        spec.master_seed = seed;
}

RunConfig parse_run_config(std::string_view text, const fs::path& base_dir) {
    const TomlDocument doc = parse_toml(text);

    for (const auto& [key, value] : doc.root.values)
        fail("unknown top-level key '" + key + "' (all keys live in sections)");
    static const std::set<std::string> kTables = {"scene", "trace", "grid",
                                                  "sweep"};
    for (const auto& [name, table] : doc.tables)
        if (!kTables.count(name)) fail("unknown section [" + name + "]");
    static const std::set<std::string> kArrays = {"tx", "perturbation", "source"};
    for (const auto& [name, tables] : doc.table_arrays)
        if (!kArrays.count(name)) fail("unknown section [[" + name + "]]");

    RunConfig cfg;

    if (const TomlTable* t = doc.find_table("scene"))
        parse_scene(*t, base_dir, cfg.scene);

    if (const TomlTable* t = doc.find_table("trace")) {
        static const std::set<std::string> kKeys = {"frequency_hz", "max_order",
                                                    "diffraction"};
        reject_unknown(*t, kKeys, "[trace]");
        cfg.trace.frequency_hz =
            positive_number(*t, "frequency_hz", "[trace]", cfg.trace.frequency_hz);
        cfg.trace.max_reflection_order = static_cast<int>(
            int_in(*t, "max_order", "[trace]", 0, 7, cfg.trace.max_reflection_order));
        cfg.trace.diffraction_enabled =
            t->boolean_or("diffraction", cfg.trace.diffraction_enabled);
    }

    if (const TomlTable* t = doc.find_table("grid")) {
        static const std::set<std::string> kKeys = {"spacing_m", "clearance_m"};
        reject_unknown(*t, kKeys, "[grid]");
        cfg.grid_spacing_m =
            positive_number(*t, "spacing_m", "[grid]", cfg.grid_spacing_m);
        cfg.grid_clearance_m =
            nonnegative_number(*t, "clearance_m", "[grid]", cfg.grid_clearance_m);
    }

    if (const TomlTable* t = doc.find_table("sweep")) {
        static const std::set<std::string> kKeys = {
            "draws",   "master_seed", "min_samples", "profile_bin_m",
            "pg_threshold_db", "workers", "output_dir"};
        reject_unknown(*t, kKeys, "[sweep]");
        cfg.draws =
            static_cast<int>(int_in(*t, "draws", "[sweep]", 1, 1000000, cfg.draws));
        cfg.master_seed = static_cast<std::uint64_t>(
            int_in(*t, "master_seed", "[sweep]", 0, 1ll << 53,
                   static_cast<long long>(cfg.master_seed)));
        cfg.min_samples = static_cast<int>(
            int_in(*t, "min_samples", "[sweep]", 0, 1000000, cfg.min_samples));
        cfg.profile_bin_m =
            positive_number(*t, "profile_bin_m", "[sweep]", cfg.profile_bin_m);
        if (t->has("pg_threshold_db")) {
            cfg.pg_threshold_db = t->number("pg_threshold_db");
            if (!std::isfinite(cfg.pg_threshold_db))
                fail("key 'pg_threshold_db' in [sweep] must be finite");
        }
        cfg.workers =
            static_cast<int>(int_in(*t, "workers", "[sweep]", 1, 4096, cfg.workers));
        cfg.output_dir =
            resolve_path(t->string_or("output_dir", cfg.output_dir), base_dir);
        if (cfg.output_dir.empty())
            fail("key 'output_dir' in [sweep] must not be empty");
    } else {
        cfg.output_dir = resolve_path(cfg.output_dir, base_dir);
    }

    if (const auto it = doc.table_arrays.find("tx"); it != doc.table_arrays.end())
        for (size_t i = 0; i < it->second.size(); ++i)
            cfg.tx.push_back(parse_tx(it->second[i], i));

    if (const auto it = doc.table_arrays.find("perturbation");
        it != doc.table_arrays.end()) {
        for (size_t i = 0; i < it->second.size(); ++i) {
            perturb::PerturbationSpec spec = parse_perturbation(it->second[i], i);
            for (const perturb::PerturbationSpec& prev : cfg.perturbations)
                if (prev.kind == spec.kind)
                    fail("duplicate perturbation kind '" +
                         std::string(perturb::to_string(spec.kind)) + "'");
            cfg.perturbations.push_back(spec);
        }
    }

    if (const auto it = doc.table_arrays.find("source");
        it != doc.table_arrays.end())
        for (size_t i = 0; i < it->second.size(); ++i)
            cfg.sources.push_back(parse_source(it->second[i], i));

    // Stamp the sweep-wide draw count and seed into every family.
    for (perturb::PerturbationSpec& spec : cfg.perturbations) {
        spec.count = cfg.draws;
        spec.master_seed = cfg.master_seed;
        spec.validate();
    }
    return cfg;
}

RunConfig load_run_config(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw ParseError("cannot read run configuration file: " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_run_config(ss.str(), file.parent_path());
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

std::string render_run_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "# Fully resolved run configuration (defaults applied, paths\n"
           "# absolute). Re-running from this file reproduces the run.\n";

    out << "\n[scene]\n";
    if (cfg.scene.prebuilt()) {
        out << "scene_dir = " << quoted(cfg.scene.scene_dir) << "\n";
    } else {
        if (!cfg.scene.footprints_path.empty()) {
            out << "footprints = " << quoted(cfg.scene.footprints_path) << "\n";
            out << "terrain = " << quoted(cfg.scene.terrain_path) << "\n";
        }
        if (cfg.scene.region) {
            const geo::GeoRegion& r = *cfg.scene.region;
            out << "lat_min = " << fmt(r.lat_min) << "\n";
            out << "lat_max = " << fmt(r.lat_max) << "\n";
            out << "lon_min = " << fmt(r.lon_min) << "\n";
            out << "lon_max = " << fmt(r.lon_max) << "\n";
            out << "origin_lat = " << fmt(r.origin_lat) << "\n";
            out << "origin_lon = " << fmt(r.origin_lon) << "\n";
        }
        if (!cfg.scene.footprints_path.empty()) {
            out << "building_material = " << quoted(cfg.scene.building_material)
                << "\n";
            out << "ground_material = " << quoted(cfg.scene.ground_material)
                << "\n";
            out << "meters_per_level = " << fmt(cfg.scene.meters_per_level) << "\n";
            out << "default_height_m = " << fmt(cfg.scene.default_height_m) << "\n";
        }
    }
    out << "label = " << quoted(cfg.scene.label) << "\n";

    out << "\n[trace]\n";
    out << "frequency_hz = " << fmt(cfg.trace.frequency_hz) << "\n";
    out << "max_order = " << cfg.trace.max_reflection_order << "\n";
    out << "diffraction = " << (cfg.trace.diffraction_enabled ? "true" : "false")
        << "\n";

    out << "\n[grid]\n";
    out << "spacing_m = " << fmt(cfg.grid_spacing_m) << "\n";
    out << "clearance_m = " << fmt(cfg.grid_clearance_m) << "\n";

    out << "\n[sweep]\n";
    out << "draws = " << cfg.draws << "\n";
    out << "master_seed = " << cfg.master_seed << "\n";
    out << "min_samples = " << cfg.min_samples << "\n";
    out << "profile_bin_m = " << fmt(cfg.profile_bin_m) << "\n";
    out << "pg_threshold_db = " << fmt(cfg.pg_threshold_db) << "\n";
    out << "workers = " << cfg.workers << "\n";
    out << "output_dir = " << quoted(cfg.output_dir) << "\n";

    for (const TxPlacement& tx : cfg.tx) {
        out << "\n[[tx]]\n";
        if (tx.geographic) {
            out << "lat = " << fmt(tx.lat) << "\n";
            out << "lon = " << fmt(tx.lon) << "\n";
            out << "height_agl_m = " << fmt(tx.height_agl_m) << "\n";
        } else {
            out << "x = " << fmt(tx.x) << "\n";
            out << "y = " << fmt(tx.y) << "\n";
            out << "z = " << fmt(tx.z) << "\n";
        }
    }

    for (const perturb::PerturbationSpec& spec : cfg.perturbations) {
        out << "\n[[perturbation]]\n";
        out << "kind = " << quoted(perturb::to_string(spec.kind)) << "\n";
        out << "sigma_height_m = " << fmt(spec.sigma_height_m) << "\n";
        out << "sigma_position_m = " << fmt(spec.sigma_pos_m) << "\n";
        out << "material_fraction = " << fmt(spec.material_rel_sigma) << "\n";
        out << "per_vertex = " << (spec.per_vertex ? "true" : "false") << "\n";
    }

    for (const fetch::FetchSource& src : cfg.sources) {
        out << "\n[[source]]\n";
        out << "kind = " << quoted(fetch::to_string(src.kind)) << "\n";
        out << "endpoint = " << quoted(src.endpoint) << "\n";
        out << "timeout_s = " << fmt(src.timeout_s) << "\n";
        out << "retry_count = " << src.retry_count << "\n";
    }
    return out.str();
}

} // namespace gert::config

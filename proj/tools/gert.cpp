// SPDX-License-Identifier: Apache-2.0
// gert command-line front end.
//
// Subcommands: fetch (populate the download cache), build (inputs -> scene
// directory), trace (single tx/rx path dump), sweep (full Monte Carlo
// study), report (regenerate analysis products from stored raw samples).
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
#include "gert/config/run_config.hpp"
#include "gert/error.hpp"
#include "gert/fetch/fetch.hpp"
#include "gert/geo/esri_grid.hpp"
#include "gert/geo/geojson.hpp"
#include "gert/geo/projection.hpp"
#include "gert/metrics/metrics.hpp"
#include "gert/rt/bvh.hpp"
#include "gert/rt/tracer.hpp"
#include "gert/scene/scene.hpp"
#include "gert/scene/scene_io.hpp"
#include "gert/sweep/sweep.hpp"
#include "gert/sweep/sweep_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using gert::config::RunConfig;

std::string fmtg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string slurp(const fs::path& file, const std::string& what) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw gert::IoError("cannot read " + what + ": " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const fs::path& file, const std::string& bytes) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw gert::IoError("cannot write file: " + file.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw gert::IoError("failed writing file: " + file.string());
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string resolve_cli_path(const std::string& p) {
    return fs::absolute(fs::path(p)).lexically_normal().string();
}

/// Parse "x,y,z" into a point. Throws ParseError on malformed input.
gert::Vec3 parse_triple(const std::string& text, const std::string& flag) {
    std::array<double, 3> v{};
    size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        const size_t comma = text.find(',', start);
        const bool last = i == 2;
        if (last != (comma == std::string::npos))
            throw gert::ParseError(flag + " expects x,y,z, got '" + text + "'");
        const std::string tok =
            text.substr(start, last ? std::string::npos : comma - start);
        const char* begin = tok.c_str();
        char* end = nullptr;
        v[static_cast<size_t>(i)] = std::strtod(begin, &end);
        if (tok.empty() || end != begin + tok.size())
            throw gert::ParseError(flag + " has an invalid coordinate '" + tok +
                                   "'");
        start = comma + 1;
    }
    return {v[0], v[1], v[2]};
}

struct LoadedScene {
    gert::scene::Scene scene;
    gert::geo::TerrainGrid terrain;
};

/// Materialize the configured scene plus the elevation raster the
/// receiver lattice is laid over.
LoadedScene load_scene(const RunConfig& cfg) {
    LoadedScene out;
    if (cfg.scene.prebuilt()) {
        out.scene = gert::scene::import_scene(cfg.scene.scene_dir);
        const fs::path asc = fs::path(cfg.scene.scene_dir) / "terrain.asc";
        out.terrain =
            gert::geo::parse_dem_local(slurp(asc, "scene terrain raster")).grid;
        return out;
    }

    const gert::geo::GeoRegion& region = *cfg.scene.region;
    const std::string geojson =
        slurp(cfg.scene.footprints_path, "footprints file");
    const std::string asc = slurp(cfg.scene.terrain_path, "terrain file");

    gert::geo::HeightPolicy heights;
    heights.meters_per_level = cfg.scene.meters_per_level;
    heights.default_height_m = cfg.scene.default_height_m;
    const auto footprints =
        gert::geo::parse_footprints(geojson, region, heights);
    const auto dem = gert::geo::parse_dem(asc, region);

    gert::scene::MaterialPolicy materials;
    materials.building_material = cfg.scene.building_material;
    materials.ground_material = cfg.scene.ground_material;
    out.scene = gert::scene::assemble_scene(
        footprints.footprints, dem.grid, materials, cfg.trace.frequency_hz,
        region.origin_lat, region.origin_lon);
    out.terrain = dem.grid;
    return out;
}

/// Resolve transmitter placements to metric sites (geographic entries
/// project through the scene origin and stand height_agl_m above the
/// terrain), rewriting cfg.tx so the echoed configuration replays without
/// re-resolving.
std::vector<gert::sweep::TxSite> resolve_tx(RunConfig& cfg,
                                            const gert::scene::Scene& scene,
                                            const gert::geo::TerrainGrid& terrain) {
    std::vector<gert::sweep::TxSite> sites;
    sites.reserve(cfg.tx.size());
    for (size_t i = 0; i < cfg.tx.size(); ++i) {
        gert::config::TxPlacement& tx = cfg.tx[i];
        if (tx.geographic) {
            const gert::geo::Point2 p = gert::geo::latlon_to_local(
                tx.lat, tx.lon, scene.origin_lat, scene.origin_lon);
            tx.x = p.x;
            tx.y = p.y;
            tx.z = terrain.sample(p.x, p.y) + tx.height_agl_m;
            tx.geographic = false;
        }
        sites.push_back({i + 1, {tx.x, tx.y, tx.z}});
    }
    return sites;
}

gert::sweep::SweepOptions sweep_options(const RunConfig& cfg) {
    gert::sweep::SweepOptions opt;
    opt.min_samples = cfg.min_samples;
    opt.profile_bin_m = cfg.profile_bin_m;
    opt.workers = cfg.workers;
    opt.keep_raw_samples = true; // report regenerates products from these
    opt.pg_threshold_db = cfg.pg_threshold_db;
    opt.scene_label = cfg.scene.label;
    return opt;
}

void write_run_info(const fs::path& dir, const std::string& started,
                    double elapsed_s) {
    std::ostringstream info;
    info << "started " << started << "\n"
         << "finished " << utc_timestamp() << "\n"
         << "elapsed_s " << fmtg(elapsed_s) << "\n";
    spill(dir / "run_info.txt", info.str());
}

int config_error(const char* stage, const std::exception& e) {
    std::cerr << "gert " << stage << ": configuration error: " << e.what()
              << "\n";
    return 2;
}

int runtime_error_exit(const char* stage, const std::exception& e) {
    std::cerr << "gert " << stage << ": error: " << e.what() << "\n";
    return 1;
}

// ----------------------------------------------------------------- fetch

int cmd_fetch(const std::string& config_path, const std::string& save_dir) {
    RunConfig cfg;
    try {
        cfg = gert::config::load_run_config(config_path);
        if (cfg.sources.empty())
            throw gert::ParseError("fetch needs at least one [[source]] entry in " +
                                   config_path);
        if (!cfg.scene.region)
            throw gert::ParseError(
                "fetch needs a [scene] region (lat/lon corners) in " +
                config_path);
    } catch (const std::exception& e) {
        return config_error("fetch", e);
    }

    try {
        if (!save_dir.empty()) fs::create_directories(save_dir);
        for (const gert::fetch::FetchSource& src : cfg.sources) {
            const bool is_dem = src.kind == gert::fetch::SourceKind::usgs_dem;
            const gert::fetch::FetchResult result =
                is_dem ? gert::fetch::fetch_dem(src, *cfg.scene.region)
                       : gert::fetch::fetch_footprints(src, *cfg.scene.region);
            const fs::path cached =
                gert::fetch::cache_path(src, *cfg.scene.region);
            std::cout << gert::fetch::to_string(src.kind) << ": "
                      << result.bytes.size() << " bytes ("
                      << (result.from_cache ? "cache" : "network") << ") -> "
                      << cached.string() << "\n";
            if (!result.warning.empty())
                std::cout << gert::fetch::to_string(src.kind)
                          << ": warning: " << result.warning << "\n";
            if (!save_dir.empty()) {
                const std::string name =
                    std::string(gert::fetch::to_string(src.kind)) +
                    (is_dem ? ".asc" : ".geojson");
                const fs::path saved = fs::path(save_dir) / name;
                spill(saved, result.bytes);
                std::cout << gert::fetch::to_string(src.kind) << ": saved "
                          << saved.string() << "\n";
            }
        }
        return 0;
    } catch (const std::exception& e) {
        return runtime_error_exit("fetch", e);
    }
}

// ----------------------------------------------------------------- build

int cmd_build(const std::string& config_path, const std::string& out_override) {
    RunConfig cfg;
    try {
        cfg = gert::config::load_run_config(config_path);
        if (cfg.scene.footprints_path.empty())
            throw gert::ParseError(
                "build needs [scene] footprints/terrain/region inputs in " +
                config_path);
        if (!out_override.empty())
            cfg.output_dir = resolve_cli_path(out_override);
    } catch (const std::exception& e) {
        return config_error("build", e);
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string started = utc_timestamp();
        const gert::geo::GeoRegion& region = *cfg.scene.region;

        const std::string geojson =
            slurp(cfg.scene.footprints_path, "footprints file");
        const std::string asc = slurp(cfg.scene.terrain_path, "terrain file");
        gert::geo::HeightPolicy heights;
        heights.meters_per_level = cfg.scene.meters_per_level;
        heights.default_height_m = cfg.scene.default_height_m;
        const auto footprints =
            gert::geo::parse_footprints(geojson, region, heights);
        const auto dem = gert::geo::parse_dem(asc, region);

        gert::scene::MaterialPolicy materials;
        materials.building_material = cfg.scene.building_material;
        materials.ground_material = cfg.scene.ground_material;
        const gert::scene::Scene scene = gert::scene::assemble_scene(
            footprints.footprints, dem.grid, materials, cfg.trace.frequency_hz,
            region.origin_lat, region.origin_lon);

        const fs::path out = cfg.output_dir;
        gert::scene::export_scene(scene, out);
        spill(out / "terrain.asc", gert::geo::write_esri_ascii(dem.grid));
        spill(out / "config_resolved.toml", gert::config::render_run_config(cfg));

        size_t triangles = 0;
        for (const auto& mesh : scene.meshes) triangles += mesh.triangles.size();
        std::cout << "scene written to " << out.string() << "\n"
                  << "buildings " << footprints.footprints.size()
                  << " (dropped: degenerate " << footprints.dropped_degenerate
                  << ", outside " << footprints.dropped_outside << ", invalid "
                  << footprints.dropped_invalid << ")\n"
                  << "terrain " << dem.grid.ncols << "x" << dem.grid.nrows
                  << " cells, " << dem.nodata_filled << " nodata filled\n"
                  << "meshes " << scene.meshes.size() << ", triangles "
                  << triangles << "\n";
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        write_run_info(out, started, elapsed);
        return 0;
    } catch (const std::exception& e) {
        return runtime_error_exit("build", e);
    }
}

// ----------------------------------------------------------------- trace

const char* path_kind_name(gert::rt::PathKind kind) {
    switch (kind) {
    case gert::rt::PathKind::line_of_sight: return "los";
    case gert::rt::PathKind::reflection: return "reflection";
    case gert::rt::PathKind::diffraction: return "diffraction";
    }
    return "unknown";
}

int cmd_trace(const std::string& scene_dir, const std::string& tx_text,
              const std::string& rx_text, int max_order, bool no_diffraction,
              double frequency_hz) {
    gert::Vec3 tx, rx;
    try {
        tx = parse_triple(tx_text, "--tx");
        rx = parse_triple(rx_text, "--rx");
    } catch (const std::exception& e) {
        return config_error("trace", e);
    }

    try {
        const gert::scene::Scene scene = gert::scene::import_scene(scene_dir);
        gert::rt::TraceConfig cfg;
        cfg.max_reflection_order = max_order;
        cfg.diffraction_enabled = !no_diffraction;
        cfg.frequency_hz = frequency_hz > 0 ? frequency_hz : scene.frequency_hz;

        const gert::rt::AccelStructure accel = gert::rt::build_accel(scene);
        const gert::rt::TxImageTree tree =
            gert::rt::expand_images(accel, tx, cfg);
        const gert::rt::PathSet ps =
            gert::rt::find_paths(scene, accel, tree, rx, cfg);

        std::cout << "scene " << scene_dir << "\n"
                  << "tx " << fmtg(tx.x) << ',' << fmtg(tx.y) << ',' << fmtg(tx.z)
                  << " rx " << fmtg(rx.x) << ',' << fmtg(rx.y) << ','
                  << fmtg(rx.z) << "\n"
                  << "frequency_hz " << fmtg(cfg.frequency_hz) << " max_order "
                  << cfg.max_reflection_order << " diffraction "
                  << (cfg.diffraction_enabled ? "on" : "off") << "\n"
                  << "paths " << ps.paths.size() << "\n"
                  << "# index kind interactions delay_ns gain_db phase_deg "
                     "vertices\n";
        for (size_t i = 0; i < ps.paths.size(); ++i) {
            const gert::rt::Path& p = ps.paths[i];
            const int interactions =
                p.kind == gert::rt::PathKind::reflection
                    ? static_cast<int>(p.reflections.size())
                    : (p.kind == gert::rt::PathKind::diffraction ? 1 : 0);
            const double power = std::norm(p.amplitude);
            const std::string gain =
                power > 0 ? fmtg(10.0 * std::log10(power)) : "-inf";
            const double phase_deg =
                std::arg(p.amplitude) * 180.0 / 3.14159265358979323846;
            std::cout << (i + 1) << ' ' << path_kind_name(p.kind) << ' '
                      << interactions << ' ' << fmtg(p.delay_s * 1e9) << ' '
                      << gain << ' ' << fmtg(phase_deg) << ' ';
            for (size_t v = 0; v < p.vertices.size(); ++v) {
                if (v) std::cout << " -> ";
                std::cout << '(' << fmtg(p.vertices[v].x) << ','
                          << fmtg(p.vertices[v].y) << ','
                          << fmtg(p.vertices[v].z) << ')';
            }
            std::cout << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        return runtime_error_exit("trace", e);
    }
}

// ----------------------------------------------------------------- sweep

int cmd_sweep(const std::string& config_path, std::optional<std::uint64_t> seed,
              std::optional<int> threads, const std::string& out_override) {
    RunConfig cfg;
    try {
        cfg = gert::config::load_run_config(config_path);
        if (seed) cfg.set_seed(*seed);
        if (threads) {
            if (*threads < 1)
                throw gert::ParseError("--threads must be at least 1");
            cfg.workers = *threads;
        }
        if (!out_override.empty())
            cfg.output_dir = resolve_cli_path(out_override);
        if (!cfg.scene.prebuilt() && cfg.scene.footprints_path.empty())
            throw gert::ParseError("sweep needs a [scene] section (scene_dir or "
                                   "footprints/terrain/region) in " +
                                   config_path);
        if (cfg.tx.empty())
            throw gert::ParseError("sweep needs at least one [[tx]] entry in " +
                                   config_path);
        if (cfg.perturbations.empty())
            throw gert::ParseError(
                "sweep needs at least one [[perturbation]] entry in " +
                config_path);
    } catch (const std::exception& e) {
        return config_error("sweep", e);
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string started = utc_timestamp();

        const LoadedScene loaded = load_scene(cfg);
        const gert::sweep::RxGrid grid = gert::sweep::make_rx_grid(
            loaded.terrain, cfg.grid_spacing_m, cfg.grid_clearance_m);
        const std::vector<gert::sweep::TxSite> tx_sites =
            resolve_tx(cfg, loaded.scene, loaded.terrain);

        const gert::sweep::SweepResult result =
            gert::sweep::run_sweep(loaded.scene, tx_sites, cfg.perturbations,
                                   grid, cfg.trace, sweep_options(cfg));

        const fs::path out = cfg.output_dir;
        fs::create_directories(out);
        gert::sweep::write_outputs(result, out);
        gert::sweep::write_grid_csv(grid, out / "grid.csv");
        gert::sweep::write_raw_samples(result, out);
        spill(out / "config_resolved.toml", gert::config::render_run_config(cfg));

        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        write_run_info(out, started, elapsed);
        std::cout << "sweep complete: " << tx_sites.size() << " tx x "
                  << cfg.perturbations.size() << " kinds x " << cfg.draws
                  << " draws over " << grid.cells.size() << " cells -> "
                  << out.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return runtime_error_exit("sweep", e);
    }
}

// ----------------------------------------------------------------- report

int cmd_report(const std::string& run_dir, const std::string& out_override) {
    RunConfig cfg;
    try {
        cfg = gert::config::load_run_config(fs::path(run_dir) /
                                            "config_resolved.toml");
        for (const gert::config::TxPlacement& tx : cfg.tx)
            if (tx.geographic)
                throw gert::ParseError(
                    "echoed configuration still has unresolved geographic "
                    "transmitters; report needs a completed sweep directory");
        if (cfg.tx.empty() || cfg.perturbations.empty())
            throw gert::ParseError("run directory " + run_dir +
                                   " has no transmitters or perturbations");
    } catch (const std::exception& e) {
        return config_error("report", e);
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string started = utc_timestamp();

        const gert::sweep::RxGrid grid =
            gert::sweep::read_grid_csv(fs::path(run_dir) / "grid.csv");
        std::vector<gert::sweep::TxSite> tx_sites;
        for (size_t i = 0; i < cfg.tx.size(); ++i)
            tx_sites.push_back(
                {i + 1, {cfg.tx[i].x, cfg.tx[i].y, cfg.tx[i].z}});

        auto raw = gert::sweep::read_raw_samples(run_dir, tx_sites,
                                                 cfg.perturbations,
                                                 grid.cells.size());
        gert::sweep::SweepOptions opt = sweep_options(cfg);
        opt.keep_raw_samples = false;
        const gert::sweep::SweepResult result = gert::sweep::assemble_sweep(
            tx_sites, cfg.perturbations, grid, std::move(raw), opt);

        const fs::path out =
            out_override.empty() ? fs::path(run_dir) : fs::path(out_override);
        fs::create_directories(out);
        gert::sweep::write_outputs(result, out);
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        write_run_info(out, started, elapsed);
        std::cout << "report rebuilt analysis products for "
                  << tx_sites.size() * cfg.perturbations.size()
                  << " studies -> " << out.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        return runtime_error_exit("report", e);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic urban RF ray tracing and geometry-sensitivity "
                 "studies"};
    app.require_subcommand(1);

    std::string fetch_config, fetch_save;
    CLI::App* fetch_cmd = app.add_subcommand(
        "fetch", "download footprints and terrain for the configured region "
                 "into the cache");
    fetch_cmd->add_option("--config", fetch_config, "run configuration file")
        ->required();
    fetch_cmd->add_option("--save", fetch_save,
                          "also write the fetched payloads into this directory");

    std::string build_config, build_out;
    CLI::App* build_cmd =
        app.add_subcommand("build", "assemble a scene directory from inputs");
    build_cmd->add_option("--config", build_config, "run configuration file")
        ->required();
    build_cmd->add_option("--out", build_out,
                          "scene output directory (overrides the config)");

    std::string trace_scene, trace_tx, trace_rx;
    int trace_order = 5;
    bool trace_no_diffraction = false;
    double trace_frequency = 0.0;
    CLI::App* trace_cmd = app.add_subcommand(
        "trace", "dump every propagation path between one tx and one rx");
    trace_cmd->add_option("--scene", trace_scene, "scene directory")->required();
    trace_cmd->add_option("--tx", trace_tx, "transmitter x,y,z")->required();
    trace_cmd->add_option("--rx", trace_rx, "receiver x,y,z")->required();
    trace_cmd->add_option("--max-order", trace_order,
                          "maximum reflection order (0..7)");
    trace_cmd->add_flag("--no-diffraction", trace_no_diffraction,
                        "disable edge diffraction");
    trace_cmd->add_option("--frequency", trace_frequency,
                          "carrier frequency in Hz (default: the scene's)");

    std::string sweep_config, sweep_out;
    std::optional<std::uint64_t> sweep_seed;
    std::optional<int> sweep_threads;
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "run the Monte Carlo perturbation study end to end");
    sweep_cmd->add_option("--config", sweep_config, "run configuration file")
        ->required();
    sweep_cmd->add_option("--seed", sweep_seed,
                          "override the master seed from the config");
    sweep_cmd->add_option("--threads", sweep_threads,
                          "worker threads (results are independent of this)");
    sweep_cmd->add_option("--out", sweep_out,
                          "output directory (overrides the config)");

    std::string report_run, report_out;
    CLI::App* report_cmd = app.add_subcommand(
        "report", "regenerate analysis products from a sweep's raw samples");
    report_cmd->add_option("--run", report_run, "sweep output directory")
        ->required();
    report_cmd->add_option("--out", report_out,
                           "write products here instead of into the run "
                           "directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "gert: " << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    if (app.got_subcommand(fetch_cmd)) return cmd_fetch(fetch_config, fetch_save);
    if (app.got_subcommand(build_cmd)) return cmd_build(build_config, build_out);
    if (app.got_subcommand(trace_cmd))
        return cmd_trace(trace_scene, trace_tx, trace_rx, trace_order,
                         trace_no_diffraction, trace_frequency);
    if (app.got_subcommand(sweep_cmd))
        return cmd_sweep(sweep_config, sweep_seed, sweep_threads, sweep_out);
    if (app.got_subcommand(report_cmd)) return cmd_report(report_run, report_out);
    std::cerr << "gert: no subcommand selected\n\n" << app.help() << "\n";
    return 2;
}

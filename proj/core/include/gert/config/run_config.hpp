// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/fetch/fetch.hpp"
#include "gert/geo/geo_types.hpp"
#include "gert/perturb/perturb.hpp"
#include "gert/rt/path.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gert::config {

/// Where the scene comes from: a prebuilt scene directory, or raw inputs
/// (footprint GeoJSON + elevation grid + geographic region) assembled on
/// the fly. Exactly one mode is configured.
struct SceneInput {
    std::string scene_dir;       ///< prebuilt scene directory
    std::string footprints_path; ///< GeoJSON building footprints
    std::string terrain_path;    ///< Esri ASCII elevation grid
    std::optional<geo::GeoRegion> region; ///< required with raw inputs
    std::string building_material = "itu_concrete";
    std::string ground_material = "itu_medium_dry_ground";
    double meters_per_level = 3.0;
    double default_height_m = 6.0;
    std::string label = "scene"; ///< scene name stamped into outputs

    bool prebuilt() const { return !scene_dir.empty(); }
};

/// One transmitter, placed either in the local metric frame (absolute z)
/// or geographically (height above the local terrain).
struct TxPlacement {
    bool geographic = false;
    double x = 0.0, y = 0.0, z = 0.0;
    double lat = 0.0, lon = 0.0, height_agl_m = 0.0;
};

/// Fully resolved run configuration: defaults applied, paths absolute.
struct RunConfig {
    SceneInput scene;
    rt::TraceConfig trace; ///< frequency, reflection order, diffraction
    double grid_spacing_m = 5.0;
    double grid_clearance_m = 1.5;
    int draws = 50;
    std::uint64_t master_seed = 1;
    int min_samples = 2;
    double profile_bin_m = 25.0;
    double pg_threshold_db = -130.0;
    int workers = 1;
    std::string output_dir = "out";
    std::vector<TxPlacement> tx;
    /// Perturbation families; count and master_seed mirror draws and
    /// master_seed above.
    std::vector<perturb::PerturbationSpec> perturbations;
    std::vector<fetch::FetchSource> sources; ///< used by the fetch command

    /// Re-stamp draws and the master seed into every perturbation family.
    void set_seed(std::uint64_t seed);
};

/// Parse and schema-validate a run configuration. Unknown sections or
/// keys are rejected by name; values are range-checked; relative paths
/// resolve against base_dir. Throws ParseError with the offending key.
RunConfig parse_run_config(std::string_view text,
                           const std::filesystem::path& base_dir);

/// Read and parse a configuration file; relative paths resolve against
/// the file's directory. A missing or unreadable file is a ParseError
/// (configuration errors are distinct from runtime failures).
RunConfig load_run_config(const std::filesystem::path& file);

/// Render the fully resolved configuration as a config file. Feeding the
/// result back through parse_run_config reproduces the same RunConfig,
/// so every run can be replayed from its echoed configuration.
std::string render_run_config(const RunConfig& cfg);

/// Parse a perturbation kind name (material, position, height,
/// height_position, all). Throws ParseError listing the valid names.
perturb::PerturbKind perturb_kind_from(std::string_view name);

/// Parse a fetch source kind name (osm_overpass, ms_footprints,
/// usgs_dem). Throws ParseError listing the valid names.
fetch::SourceKind source_kind_from(std::string_view name);

} // namespace gert::config

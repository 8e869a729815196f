// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/geo/geo_types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gert::fetch {

/// Remote data providers. Everything downstream also accepts local files;
/// these clients are conveniences that populate a disk cache.
enum class SourceKind {
    osm_overpass,  ///< Overpass API bounding-box building query
    ms_footprints, ///< global building-footprint tiles indexed by quadkey
    usgs_dem,      ///< elevation rasters served as Esri ASCII grids
};

const char* to_string(SourceKind kind);

struct FetchSource {
    SourceKind kind = SourceKind::osm_overpass;
    /// URL template. Placeholders substituted per request:
    ///   {lat_min} {lat_max} {lon_min} {lon_max} - region corners
    ///   {quadkey}                               - tile key (ms_footprints)
    std::string endpoint;
    double timeout_s = 30.0;
    int retry_count = 2; ///< additional attempts after the first; at most 5

    void validate() const;
};

struct FetchResult {
    std::string bytes;
    bool from_cache = false;
    std::string warning; ///< non-fatal notes (e.g. empty result)
};

/// Cache directory: $GERT_CACHE_DIR if set, else ~/.cache/gert, else a
/// gert_cache directory under the system temp path.
std::filesystem::path cache_dir();

/// Deterministic cache file for one (source, region) request.
std::filesystem::path cache_path(const FetchSource& source,
                                 const geo::GeoRegion& region);

/// The Overpass QL query issued for a region (documented template:
/// all closed ways tagged building inside the bounding box, with
/// geometry and tags).
std::string overpass_query(const geo::GeoRegion& region);

/// Bing-style quadkey of the tile containing (lat, lon) at a zoom level:
/// per level one digit 0..3 for the NW/NE/SW/SE child quadrant.
std::string quadkey(double lat, double lon, int level);

/// Sorted, deduplicated quadkeys of all tiles intersecting the region.
std::vector<std::string> region_quadkeys(const geo::GeoRegion& region,
                                         int level = 9);

/// Download building footprints as GeoJSON FeatureCollection bytes.
/// Overpass responses are converted from Overpass JSON to GeoJSON;
/// tile sources fetch every covering quadkey and concatenate features.
/// Results are cached on disk; a cache hit performs no network calls.
/// Throws Error after exhausting retries (message carries the last
/// status) and for mismatched source kinds.
FetchResult fetch_footprints(const FetchSource& source,
                             const geo::GeoRegion& region);

/// Download the covering elevation raster as Esri ASCII grid bytes.
/// The payload is validated as a parseable grid before caching. An empty
/// or missing product is reported as a coverage error naming the region.
FetchResult fetch_dem(const FetchSource& source, const geo::GeoRegion& region);

} // namespace gert::fetch

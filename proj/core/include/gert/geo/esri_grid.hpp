// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/geo/geo_types.hpp"

#include <string>
#include <string_view>

namespace gert::geo {

struct DemParseResult {
    TerrainGrid grid;
    int nodata_filled = 0;
};

/// Parse an Esri ASCII grid (.asc) into a TerrainGrid in the local frame.
///
/// Header keys (case-insensitive): ncols, nrows, xllcorner, yllcorner,
/// cellsize, optional nodata_value. Body rows run north to south and are
/// flipped into the south-up row order of TerrainGrid. NODATA cells are
/// replaced by the nearest valid sample (ties resolved in row-major scan
/// order of the output grid) and counted.
///
/// Grids whose header coordinates are plausible WGS84 degrees
/// (|xllcorner| <= 360, latitude extent within +/-90, cellsize <= 0.1)
/// are projected through the region origin and resampled bilinearly onto
/// a square metric lattice; anything else is taken to be local meters
/// already and passes through untouched.
DemParseResult parse_dem(std::string_view asc, const GeoRegion& region);

/// Parse a metric-frame Esri ASCII grid without a region. Throws
/// ParseError when the header looks like geographic degrees (those need
/// a region to project through).
DemParseResult parse_dem_local(std::string_view asc);

/// Serialize a TerrainGrid back to Esri ASCII (used by the fetch cache and
/// test fixtures). Metric frame, no NODATA values.
std::string write_esri_ascii(const TerrainGrid& grid);

} // namespace gert::geo

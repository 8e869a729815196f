// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/geo/geo_types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace gert::geo {

/// Height rules applied when a footprint lacks an explicit height property.
struct HeightPolicy {
    double meters_per_level = 3.0;
    double default_height_m = 6.0;
};

struct FootprintParseResult {
    std::vector<BuildingFootprint> footprints;
    int dropped_degenerate = 0;  // polygons below the area threshold
    int dropped_outside = 0;     // polygons not intersecting the region
    int dropped_invalid = 0;     // self-intersecting or unusable rings
};

/// Parse a GeoJSON FeatureCollection (RFC 7946 subset: Polygon and
/// MultiPolygon in WGS84) into footprints in the region's local frame.
///
/// Outer rings are clipped to the region rectangle, re-oriented
/// counter-clockwise and assigned sequential ids starting at 1. Height is
/// taken from the `height` property (meters), else `levels` * 3 m, else
/// 6 m. Polygons with a clipped area below 1 m^2 are dropped and counted.
FootprintParseResult parse_footprints(std::string_view geojson,
                                      const GeoRegion& region,
                                      const HeightPolicy& policy = {});

} // namespace gert::geo

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/geo/geo_types.hpp"

namespace gert::geo {

/// Mean Earth radius used by the equirectangular projection, meters.
inline constexpr double kEarthRadiusM = 6371000.0;

/// Equirectangular projection anchored at (origin_lat, origin_lon):
///   y = R * (lat - lat0) * pi/180
///   x = R * (lon - lon0) * pi/180 * cos(lat0)
/// Adequate for regions up to a few kilometers across.
Point2 latlon_to_local(double lat_deg, double lon_deg,
                       double origin_lat_deg, double origin_lon_deg);

/// Exact inverse of latlon_to_local. Returns (lat, lon) in degrees.
void local_to_latlon(double x, double y,
                     double origin_lat_deg, double origin_lon_deg,
                     double& lat_deg, double& lon_deg);

} // namespace gert::geo

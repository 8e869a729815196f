// SPDX-License-Identifier: Apache-2.0
#include "gert/geo/projection.hpp"

#include <cmath>
#include <numbers>

namespace gert::geo {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

Point2 latlon_to_local(double lat_deg, double lon_deg,
                       double origin_lat_deg, double origin_lon_deg) {
    const double cos_lat0 = std::cos(origin_lat_deg * kDegToRad);
    return {
        kEarthRadiusM * (lon_deg - origin_lon_deg) * kDegToRad * cos_lat0,
        kEarthRadiusM * (lat_deg - origin_lat_deg) * kDegToRad,
    };
}

void local_to_latlon(double x, double y,
                     double origin_lat_deg, double origin_lon_deg,
                     double& lat_deg, double& lon_deg) {
    const double cos_lat0 = std::cos(origin_lat_deg * kDegToRad);
    lat_deg = origin_lat_deg + y / (kEarthRadiusM * kDegToRad);
    lon_deg = origin_lon_deg + x / (kEarthRadiusM * kDegToRad * cos_lat0);
}

} // namespace gert::geo

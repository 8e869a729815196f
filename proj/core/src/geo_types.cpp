// SPDX-License-Identifier: Apache-2.0
#include "gert/geo/geo_types.hpp"

#include "gert/error.hpp"

#include <algorithm>
#include <cmath>

namespace gert::geo {

GeoRegion GeoRegion::from_corners(double lat_min, double lat_max,
                                  double lon_min, double lon_max) {
    GeoRegion r;
    r.lat_min = lat_min;
    r.lat_max = lat_max;
    r.lon_min = lon_min;
    r.lon_max = lon_max;
    r.origin_lat = 0.5 * (lat_min + lat_max);
    r.origin_lon = 0.5 * (lon_min + lon_max);
    r.validate();
    return r;
}

void GeoRegion::validate() const {
    if (!(lat_min < lat_max)) throw ParseError("region: lat_min must be < lat_max");
    if (!(lon_min < lon_max)) throw ParseError("region: lon_min must be < lon_max");
    if (origin_lat < lat_min || origin_lat > lat_max ||
        origin_lon < lon_min || origin_lon > lon_max) {
        throw ParseError("region: origin must lie inside the region");
    }
    if (std::abs(lat_min) >= 89.0 || std::abs(lat_max) >= 89.0) {
        throw ParseError("region: |latitude| must be below 89 degrees");
    }
}

double TerrainGrid::sample(double x, double y) const {
    // Continuous coordinates of the cell-center lattice.
    double u = (x - x0) / cell_size_m - 0.5;
    double v = (y - y0) / cell_size_m - 0.5;
    u = std::clamp(u, 0.0, static_cast<double>(ncols - 1));
    v = std::clamp(v, 0.0, static_cast<double>(nrows - 1));
    const int c0 = std::min(static_cast<int>(u), ncols - 2 >= 0 ? ncols - 2 : 0);
    const int r0 = std::min(static_cast<int>(v), nrows - 2 >= 0 ? nrows - 2 : 0);
    const int c1 = std::min(c0 + 1, ncols - 1);
    const int r1 = std::min(r0 + 1, nrows - 1);
    const double fu = u - c0;
    const double fv = v - r0;
    const double a = at(r0, c0) * (1.0 - fu) + at(r0, c1) * fu;
    const double b = at(r1, c0) * (1.0 - fu) + at(r1, c1) * fu;
    return a * (1.0 - fv) + b * fv;
}

double ring_signed_area(const std::vector<Point2>& ring) {
    double acc = 0.0;
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
        const Point2& p = ring[i];
        const Point2& q = ring[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    return 0.5 * acc;
}

namespace {

int orient(const Point2& a, const Point2& b, const Point2& c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Point2& a, const Point2& b,
                        const Point2& c, const Point2& d) {
    const int o1 = orient(a, b, c);
    const int o2 = orient(a, b, d);
    const int o3 = orient(c, d, a);
    const int o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

} // namespace

bool ring_is_simple(const std::vector<Point2>& ring) {
    const size_t n = ring.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        const Point2& a = ring[i];
        const Point2& b = ring[(i + 1) % n];
        for (size_t j = i + 1; j < n; ++j) {
            // Skip adjacent edges (they share one endpoint by construction).
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            const Point2& c = ring[j];
            const Point2& d = ring[(j + 1) % n];
            if (segments_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

} // namespace gert::geo

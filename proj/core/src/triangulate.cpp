// SPDX-License-Identifier: Apache-2.0
#include "gert/scene/triangulate.hpp"

#include "gert/error.hpp"

#include <cmath>
#include <numeric>

namespace gert::scene {

namespace {

using geo::Point2;

double cross2(const Point2& a, const Point2& b, const Point2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Inclusive point-in-triangle test: boundary points count as inside, which
// makes the ear test conservative (an ear is rejected if any other vertex
// touches it).
bool point_in_triangle(const Point2& p, const Point2& a, const Point2& b, const Point2& c) {
    const double d1 = cross2(a, b, p);
    const double d2 = cross2(b, c, p);
    const double d3 = cross2(c, a, p);
    const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
    const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
    return !(has_neg && has_pos);
}

} // namespace

std::vector<std::array<std::int32_t, 3>>
triangulate_polygon(const std::vector<Point2>& ring) {
    const size_t n = ring.size();
    if (n < 3) throw GeometryError("polygon needs at least 3 vertices");
    if (!geo::ring_is_simple(ring)) {
        throw GeometryError("polygon ring is self-intersecting");
    }
    if (geo::ring_signed_area(ring) <= 0) {
        throw GeometryError("polygon ring must wind counter-clockwise");
    }

    std::vector<std::int32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::array<std::int32_t, 3>> tris;
    tris.reserve(n - 2);

    while (idx.size() > 3) {
        bool clipped = false;
        for (size_t k = 0; k < idx.size(); ++k) {
            const std::int32_t ia = idx[(k + idx.size() - 1) % idx.size()];
            const std::int32_t ib = idx[k];
            const std::int32_t ic = idx[(k + 1) % idx.size()];
            if (cross2(ring[ia], ring[ib], ring[ic]) <= 0) continue; // reflex/degenerate tip
            bool blocked = false;
            for (size_t m = 0; m < idx.size() && !blocked; ++m) {
                const std::int32_t ip = idx[m];
                if (ip == ia || ip == ib || ip == ic) continue;
                blocked = point_in_triangle(ring[ip], ring[ia], ring[ib], ring[ic]);
            }
            if (blocked) continue;
            tris.push_back({ia, ib, ic});
            idx.erase(idx.begin() + static_cast<long>(k));
            clipped = true;
            break;
        }
        if (!clipped) {
            throw GeometryError("ear clipping failed: polygon is degenerate");
        }
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

} // namespace gert::scene

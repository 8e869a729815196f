// SPDX-License-Identifier: Apache-2.0
#include "gert/geo/geojson.hpp"

#include "gert/error.hpp"
#include "gert/geo/projection.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>

namespace gert::geo {

namespace {

using nlohmann::json;

constexpr double kMinAreaM2 = 1.0;     // degenerate-polygon threshold
constexpr double kWeldEpsM = 1e-9;     // consecutive-duplicate weld distance
constexpr double kCollinearEpsM = 1e-9;

std::optional<double> numeric_property(const json& props, const char* key) {
    if (!props.is_object() || !props.contains(key)) return std::nullopt;
    const json& v = props.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        // Footprint datasets frequently store numbers as strings,
        // occasionally with a unit suffix ("12 m").
        std::string s = v.get<std::string>();
        const char* begin = s.c_str();
        char* end = nullptr;
        const double parsed = std::strtod(begin, &end);
        if (end == begin) return std::nullopt;
        while (*end == ' ') ++end;
        if (*end == 'm') ++end;
        while (*end == ' ') ++end;
        if (*end != '\0') return std::nullopt;
        return parsed;
    }
    return std::nullopt;
}

/// Sutherland-Hodgman clip of a ring against one half-plane keep(p) >= 0.
template <typename KeepFn, typename LerpFn>
std::vector<Point2> clip_half_plane(const std::vector<Point2>& ring,
                                    KeepFn inside, LerpFn intersect) {
    std::vector<Point2> out;
    const size_t n = ring.size();
    out.reserve(n + 4);
    for (size_t i = 0; i < n; ++i) {
        const Point2& cur = ring[i];
        const Point2& nxt = ring[(i + 1) % n];
        const bool cin = inside(cur);
        const bool nin = inside(nxt);
        if (cin) {
            out.push_back(cur);
            if (!nin) out.push_back(intersect(cur, nxt));
        } else if (nin) {
            out.push_back(intersect(cur, nxt));
        }
    }
    return out;
}

std::vector<Point2> clip_to_rect(std::vector<Point2> ring,
                                 double xmin, double xmax,
                                 double ymin, double ymax) {
    auto lerp_x = [](const Point2& a, const Point2& b, double x) {
        const double t = (x - a.x) / (b.x - a.x);
        return Point2{x, a.y + t * (b.y - a.y)};
    };
    auto lerp_y = [](const Point2& a, const Point2& b, double y) {
        const double t = (y - a.y) / (b.y - a.y);
        return Point2{a.x + t * (b.x - a.x), y};
    };
    ring = clip_half_plane(ring, [&](const Point2& p) { return p.x >= xmin; },
                           [&](const Point2& a, const Point2& b) { return lerp_x(a, b, xmin); });
    if (ring.empty()) return ring;
    ring = clip_half_plane(ring, [&](const Point2& p) { return p.x <= xmax; },
                           [&](const Point2& a, const Point2& b) { return lerp_x(a, b, xmax); });
    if (ring.empty()) return ring;
    ring = clip_half_plane(ring, [&](const Point2& p) { return p.y >= ymin; },
                           [&](const Point2& a, const Point2& b) { return lerp_y(a, b, ymin); });
    if (ring.empty()) return ring;
    ring = clip_half_plane(ring, [&](const Point2& p) { return p.y <= ymax; },
                           [&](const Point2& a, const Point2& b) { return lerp_y(a, b, ymax); });
    return ring;
}

void weld_and_clean(std::vector<Point2>& ring) {
    // Drop the explicit closing vertex and consecutive duplicates.
    auto near = [](const Point2& a, const Point2& b) {
        return std::abs(a.x - b.x) <= kWeldEpsM && std::abs(a.y - b.y) <= kWeldEpsM;
    };
    std::vector<Point2> welded;
    welded.reserve(ring.size());
    for (const Point2& p : ring) {
        if (welded.empty() || !near(welded.back(), p)) welded.push_back(p);
    }
    while (welded.size() > 1 && near(welded.front(), welded.back())) welded.pop_back();

    // Remove vertices lying on the segment between their neighbors; they
    // would produce zero-area triangles downstream.
    bool removed = true;
    while (removed && welded.size() > 3) {
        removed = false;
        for (size_t i = 0; i < welded.size(); ++i) {
            const Point2& a = welded[(i + welded.size() - 1) % welded.size()];
            const Point2& b = welded[i];
            const Point2& c = welded[(i + 1) % welded.size()];
            const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
            const double len = std::hypot(c.x - a.x, c.y - a.y);
            if (len > 0 && std::abs(cross) / len <= kCollinearEpsM &&
                std::min({a.x, c.x}) - kCollinearEpsM <= b.x && b.x <= std::max({a.x, c.x}) + kCollinearEpsM &&
                std::min({a.y, c.y}) - kCollinearEpsM <= b.y && b.y <= std::max({a.y, c.y}) + kCollinearEpsM) {
                welded.erase(welded.begin() + static_cast<long>(i));
                removed = true;
                break;
            }
        }
    }
    ring = std::move(welded);
}

int line_of_byte(std::string_view text, size_t byte) {
    int line = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

} // namespace

FootprintParseResult parse_footprints(std::string_view geojson,
                                      const GeoRegion& region,
                                      const HeightPolicy& policy) {
    region.validate();

    json doc;
    try {
        doc = json::parse(geojson);
    } catch (const json::parse_error& e) {
        throw ParseError("GeoJSON parse error at line " +
                         std::to_string(line_of_byte(geojson, e.byte)) + ": " + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
        throw ParseError("GeoJSON document is not a FeatureCollection");
    }
    if (!doc.contains("features") || !doc["features"].is_array()) {
        throw ParseError("FeatureCollection has no features array");
    }

    const Point2 lo = latlon_to_local(region.lat_min, region.lon_min,
                                      region.origin_lat, region.origin_lon);
    const Point2 hi = latlon_to_local(region.lat_max, region.lon_max,
                                      region.origin_lat, region.origin_lon);

    FootprintParseResult result;
    std::int64_t next_id = 1;

    auto ring_to_local = [&](const json& coords) {
        std::vector<Point2> ring;
        ring.reserve(coords.size());
        for (const json& c : coords) {
            if (!c.is_array() || c.size() < 2) throw ParseError("GeoJSON position is not [lon, lat]");
            ring.push_back(latlon_to_local(c.at(1).get<double>(), c.at(0).get<double>(),
                                           region.origin_lat, region.origin_lon));
        }
        return ring;
    };

    auto accept_polygon = [&](const json& polygon_coords, const json& props) {
        if (!polygon_coords.is_array() || polygon_coords.empty()) {
            ++result.dropped_invalid;
            return;
        }
        std::vector<Point2> ring = ring_to_local(polygon_coords.at(0)); // outer ring only
        weld_and_clean(ring);
        if (ring.size() < 3) {
            ++result.dropped_invalid;
            return;
        }
        if (!ring_is_simple(ring)) {
            ++result.dropped_invalid;
            return;
        }
        ring = clip_to_rect(std::move(ring), lo.x, hi.x, lo.y, hi.y);
        weld_and_clean(ring);
        if (ring.size() < 3) {
            ++result.dropped_outside;
            return;
        }
        double area = ring_signed_area(ring);
        if (area < 0) {
            std::reverse(ring.begin(), ring.end());
            area = -area;
        }
        if (area < kMinAreaM2) {
            ++result.dropped_degenerate;
            return;
        }
        if (!ring_is_simple(ring)) {
            ++result.dropped_invalid;
            return;
        }

        BuildingFootprint fp;
        fp.id = next_id++;
        fp.outer_ring = std::move(ring);
        if (auto h = numeric_property(props, "height"); h && *h > 0) {
            fp.height_m = *h;
            fp.height_source = HeightSource::explicit_value;
        } else if (auto lv = numeric_property(props, "levels"); lv && *lv > 0) {
            fp.height_m = *lv * policy.meters_per_level;
            fp.height_source = HeightSource::levels_rule;
        } else {
            fp.height_m = policy.default_height_m;
            fp.height_source = HeightSource::default_rule;
        }
        result.footprints.push_back(std::move(fp));
    };

    for (const json& feature : doc["features"]) {
        if (!feature.is_object() || feature.value("type", "") != "Feature") {
            ++result.dropped_invalid;
            continue;
        }
        const json props = feature.value("properties", json::object());
        if (!feature.contains("geometry") || feature["geometry"].is_null()) {
            ++result.dropped_invalid;
            continue;
        }
        const json& geom = feature["geometry"];
        const std::string type = geom.value("type", "");
        try {
            if (type == "Polygon") {
                accept_polygon(geom.at("coordinates"), props);
            } else if (type == "MultiPolygon") {
                for (const json& poly : geom.at("coordinates")) accept_polygon(poly, props);
            } else {
                ++result.dropped_invalid;
            }
        } catch (const json::exception&) {
            throw ParseError("GeoJSON feature has malformed coordinates");
        }
    }
    return result;
}

} // namespace gert::geo

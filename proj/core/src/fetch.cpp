// SPDX-License-Identifier: Apache-2.0
#include "gert/fetch/fetch.hpp"

#include "gert/error.hpp"
#include "gert/geo/esri_grid.hpp"

#include <httplib.h>
#include <json.hpp>

#include <array>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace gert::fetch {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Politeness: at most one in-flight request per source kind.
std::mutex& source_mutex(SourceKind kind) {
    static std::array<std::mutex, 3> mutexes;
    return mutexes[static_cast<size_t>(kind)];
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8f", v);
    return buf;
}

void replace_all(std::string& s, const std::string& token, const std::string& value) {
    for (size_t pos = s.find(token); pos != std::string::npos;
         pos = s.find(token, pos + value.size()))
        s.replace(pos, token.size(), value);
}

std::string substitute(std::string templ, const geo::GeoRegion& region,
                       const std::string& quadkey_value = {}) {
    replace_all(templ, "{lat_min}", fmt_coord(region.lat_min));
    replace_all(templ, "{lat_max}", fmt_coord(region.lat_max));
    replace_all(templ, "{lon_min}", fmt_coord(region.lon_min));
    replace_all(templ, "{lon_max}", fmt_coord(region.lon_max));
    replace_all(templ, "{quadkey}", quadkey_value);
    return templ;
}

struct UrlParts {
    std::string base; ///< scheme://host[:port]
    std::string path; ///< path + query, at least "/"
};

UrlParts split_url(const std::string& url) {
    const size_t scheme = url.find("://");
    if (scheme == std::string::npos)
        throw Error("fetch endpoint is not an absolute URL: " + url);
    const size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

/// One HTTP round trip with retries. POST when body is non-empty.
/// Returns the response body; throws after exhausting attempts with the
/// last status in the message.
std::string http_fetch(const FetchSource& source, const std::string& url,
                       const std::string& post_body,
                       const std::string& content_type) {
    const UrlParts parts = split_url(url);
    std::string last_status = "no attempt made";
    const int attempts = 1 + source.retry_count;
    int made = 0;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
        httplib::Client client(parts.base);
        const auto timeout = std::chrono::duration<double>(source.timeout_s);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        const httplib::Result res =
            post_body.empty() ? client.Get(parts.path)
                              : client.Post(parts.path, post_body, content_type);
        ++made;
        if (!res) {
            last_status = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) return res->body;
        last_status = "HTTP status " + std::to_string(res->status);
        if (res->status >= 400 && res->status < 500) break; // not retryable
    }
    throw FetchError("fetch from " + url + " failed after " +
                     std::to_string(made) + " attempt(s); last result: " +
                     last_status);
}

std::optional<std::string> read_cache(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_cache(const std::filesystem::path& p, const std::string& bytes) {
    std::filesystem::create_directories(p.parent_path());
    // Write-then-rename so a crashed run never leaves a torn cache entry.
    const std::filesystem::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("cannot write cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
}

std::string region_text(const geo::GeoRegion& r) {
    std::ostringstream ss;
    ss << "lat [" << fmt_coord(r.lat_min) << ", " << fmt_coord(r.lat_max)
       << "], lon [" << fmt_coord(r.lon_min) << ", " << fmt_coord(r.lon_max) << "]";
    return ss.str();
}

/// Convert an Overpass JSON response (ways with inline geometry) into a
/// GeoJSON FeatureCollection of polygons, carrying the OSM tags through
/// as properties. OSM's building:levels tag is mirrored into `levels`.
std::string overpass_to_geojson(const std::string& body) {
    json overpass;
    try {
        overpass = json::parse(body);
    } catch (const json::exception& e) {
        throw ParseError(std::string("Overpass response is not valid JSON: ") +
                         e.what());
    }
    json features = json::array();
    for (const json& el : overpass.value("elements", json::array())) {
        if (el.value("type", "") != "way" || !el.contains("geometry")) continue;
        json ring = json::array();
        for (const json& pt : el.at("geometry"))
            ring.push_back(json::array({pt.at("lon").get<double>(),
                                        pt.at("lat").get<double>()}));
        if (ring.size() < 3) continue;
        if (ring.front() != ring.back()) ring.push_back(ring.front());
        json props = el.value("tags", json::object());
        if (props.contains("building:levels") && !props.contains("levels"))
            props["levels"] = props["building:levels"];
        json feature = {
            {"type", "Feature"},
            {"id", el.value("id", std::int64_t{0})},
            {"properties", props},
            {"geometry",
             {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
        };
        features.push_back(std::move(feature));
    }
    const json fc = {{"type", "FeatureCollection"}, {"features", features}};
    return fc.dump();
}

/// Merge several GeoJSON FeatureCollections into one.
std::string concat_feature_collections(const std::vector<std::string>& payloads) {
    json features = json::array();
    for (const std::string& payload : payloads) {
        json fc;
        try {
            fc = json::parse(payload);
        } catch (const json::exception& e) {
            throw ParseError(std::string("footprint tile is not valid JSON: ") +
                             e.what());
        }
        for (json& f : fc.value("features", json::array()))
            features.push_back(std::move(f));
    }
    const json fc = {{"type", "FeatureCollection"}, {"features", features}};
    return fc.dump();
}

std::size_t feature_count(const std::string& geojson_bytes) {
    const json fc = json::parse(geojson_bytes, nullptr, false);
    if (fc.is_discarded()) return 0;
    return fc.value("features", json::array()).size();
}

} // namespace

const char* to_string(SourceKind kind) {
    switch (kind) {
    case SourceKind::osm_overpass: return "osm_overpass";
    case SourceKind::ms_footprints: return "ms_footprints";
    case SourceKind::usgs_dem: return "usgs_dem";
    }
    return "unknown";
}

void FetchSource::validate() const {
    if (endpoint.empty()) throw Error("fetch source endpoint is empty");
    if (retry_count < 0 || retry_count > 5)
        throw Error("fetch retry_count must lie in [0, 5]");
    if (timeout_s <= 0.0) throw Error("fetch timeout must be positive");
}

std::filesystem::path cache_dir() {
    if (const char* env = std::getenv("GERT_CACHE_DIR"); env && *env)
        return std::filesystem::path(env);
    if (const char* home = std::getenv("HOME"); home && *home)
        return std::filesystem::path(home) / ".cache" / "gert";
    return std::filesystem::temp_directory_path() / "gert_cache";
}

std::filesystem::path cache_path(const FetchSource& source,
                                 const geo::GeoRegion& region) {
    std::ostringstream key;
    key << source.endpoint << '|' << fmt_coord(region.lat_min) << ','
        << fmt_coord(region.lat_max) << ',' << fmt_coord(region.lon_min) << ','
        << fmt_coord(region.lon_max);
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(key.str())));
    const char* ext = source.kind == SourceKind::usgs_dem ? ".asc" : ".json";
    return cache_dir() / (std::string(to_string(source.kind)) + "_" + hash + ext);
}

std::string overpass_query(const geo::GeoRegion& region) {
    std::ostringstream q;
    q << "[out:json][timeout:60];"
      << "(way[\"building\"](" << fmt_coord(region.lat_min) << ','
      << fmt_coord(region.lon_min) << ',' << fmt_coord(region.lat_max) << ','
      << fmt_coord(region.lon_max) << "););out geom;";
    return q.str();
}

namespace {

struct TileXY {
    std::int64_t x = 0;
    std::int64_t y = 0;
};

/// Web Mercator tile containing (lat, lon) at a zoom level, with the
/// projection's latitude clamp applied.
TileXY tile_for(double lat, double lon, int level) {
    if (level < 1 || level > 23) throw Error("quadkey level must lie in [1, 23]");
    lat = std::clamp(lat, -85.05112878, 85.05112878);
    lon = std::clamp(lon, -180.0, 180.0);
    const double x = (lon + 180.0) / 360.0;
    const double s = std::sin(lat * kPi / 180.0);
    const double y = 0.5 - std::log((1.0 + s) / (1.0 - s)) / (4.0 * kPi);
    const std::int64_t map_size = std::int64_t{1} << level;
    const auto clamp_tile = [&](double v) {
        return std::clamp<std::int64_t>(
            static_cast<std::int64_t>(v * static_cast<double>(map_size)), 0,
            map_size - 1);
    };
    return {clamp_tile(x), clamp_tile(y)};
}

std::string quadkey_of_tile(const TileXY& t, int level) {
    std::string key;
    key.reserve(static_cast<size_t>(level));
    for (int i = level; i > 0; --i) {
        const std::int64_t mask = std::int64_t{1} << (i - 1);
        int digit = 0;
        if (t.x & mask) digit += 1;
        if (t.y & mask) digit += 2;
        key.push_back(static_cast<char>('0' + digit));
    }
    return key;
}

} // namespace

std::string quadkey(double lat, double lon, int level) {
    return quadkey_of_tile(tile_for(lat, lon, level), level);
}

std::vector<std::string> region_quadkeys(const geo::GeoRegion& region, int level) {
    region.validate();
    // The projection is monotone in both axes, so the corner tiles bound
    // the full tile rectangle covering the region. Tile y grows south.
    const TileXY nw = tile_for(region.lat_max, region.lon_min, level);
    const TileXY se = tile_for(region.lat_min, region.lon_max, level);
    std::vector<std::string> keys;
    for (std::int64_t ty = nw.y; ty <= se.y; ++ty)
        for (std::int64_t tx = nw.x; tx <= se.x; ++tx)
            keys.push_back(quadkey_of_tile({tx, ty}, level));
    std::sort(keys.begin(), keys.end());
    return keys;
}

FetchResult fetch_footprints(const FetchSource& source,
                             const geo::GeoRegion& region) {
    source.validate();
    region.validate();
    if (source.kind == SourceKind::usgs_dem)
        throw Error("fetch_footprints cannot use a DEM source");

    const std::filesystem::path cached = cache_path(source, region);
    if (auto bytes = read_cache(cached))
        return {std::move(*bytes), true, {}};

    std::lock_guard<std::mutex> polite(source_mutex(source.kind));
    std::string geojson_bytes;
    if (source.kind == SourceKind::osm_overpass) {
        const std::string url = substitute(source.endpoint, region);
        const std::string body =
            "data=" + httplib::detail::encode_url(overpass_query(region));
        const std::string response =
            http_fetch(source, url, body, "application/x-www-form-urlencoded");
        geojson_bytes = overpass_to_geojson(response);
    } else {
        std::vector<std::string> tiles;
        for (const std::string& key : region_quadkeys(region)) {
            const std::string url = substitute(source.endpoint, region, key);
            tiles.push_back(http_fetch(source, url, {}, {}));
        }
        geojson_bytes = concat_feature_collections(tiles);
    }

    FetchResult result;
    result.bytes = geojson_bytes;
    if (feature_count(geojson_bytes) == 0) {
        result.warning = "no footprints found for region " + region_text(region);
        std::fprintf(stderr, "warning: %s\n", result.warning.c_str());
    }
    write_cache(cached, result.bytes);
    return result;
}

FetchResult fetch_dem(const FetchSource& source, const geo::GeoRegion& region) {
    source.validate();
    region.validate();
    if (source.kind != SourceKind::usgs_dem)
        throw Error("fetch_dem needs a DEM source");

    const std::filesystem::path cached = cache_path(source, region);
    if (auto bytes = read_cache(cached))
        return {std::move(*bytes), true, {}};

    std::lock_guard<std::mutex> polite(source_mutex(source.kind));
    const std::string url = substitute(source.endpoint, region);
    const std::string body = http_fetch(source, url, {}, {});
    if (body.empty())
        throw FetchError("elevation provider returned no data for region " +
                         region_text(region));
    // Validate the payload parses as the ASCII grid the pipeline consumes
    // before caching it.
    try {
        (void)geo::parse_dem(body, region);
    } catch (const std::exception& e) {
        throw FetchError("elevation payload for region " + region_text(region) +
                         " is not a usable grid: " + e.what());
    }
    write_cache(cached, body);
    return {body, false, {}};
}

} // namespace gert::fetch

// SPDX-License-Identifier: Apache-2.0
//
// Tests for the data-acquisition layer: loopback HTTP fixtures exercise the
// building-footprint and elevation fetchers end to end (request shaping,
// response conversion, disk cache, retry/error reporting), plus hand oracles
// for the Web Mercator quadkey scheme used by tiled footprint sources.
#include <doctest.h>

#include "gert/error.hpp"
#include "gert/fetch/fetch.hpp"
#include "gert/geo/esri_grid.hpp"
#include "gert/geo/geojson.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

using gert::fetch::FetchSource;
using gert::fetch::SourceKind;
using nlohmann::json;

namespace {

/// Redirect the on-disk cache to a fresh temp directory for one test case so
/// runs never see each other's entries (and never touch the real cache).
struct ScopedCacheDir {
    std::filesystem::path dir;

    ScopedCacheDir() {
        static std::atomic<int> counter{0};
        dir = std::filesystem::temp_directory_path() /
              ("gert_fetch_test_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(dir);
        ::setenv("GERT_CACHE_DIR", dir.c_str(), 1);
    }

    ScopedCacheDir(const ScopedCacheDir&) = delete;
    ScopedCacheDir& operator=(const ScopedCacheDir&) = delete;

    ~ScopedCacheDir() {
        ::unsetenv("GERT_CACHE_DIR");
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
};

/// In-process HTTP server on a loopback ephemeral port.
struct LocalServer {
    httplib::Server svr;
    std::thread thread;
    int port = 0;

    void start() {
        port = svr.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { svr.listen_after_bind(); });
        svr.wait_until_ready();
    }

    std::string base() const {
        return "http://127.0.0.1:" + std::to_string(port);
    }

    ~LocalServer() {
        svr.stop();
        if (thread.joinable()) thread.join();
    }
};

/// A square way element in the shape the ways API returns (open ring; the
/// converter is expected to close it).
json way_element(std::int64_t id, double lon0, double lat0, double size_deg,
                 json tags) {
    json geom = json::array();
    geom.push_back({{"lat", lat0}, {"lon", lon0}});
    geom.push_back({{"lat", lat0}, {"lon", lon0 + size_deg}});
    geom.push_back({{"lat", lat0 + size_deg}, {"lon", lon0 + size_deg}});
    geom.push_back({{"lat", lat0 + size_deg}, {"lon", lon0}});
    return {{"type", "way"}, {"id", id}, {"tags", std::move(tags)},
            {"geometry", std::move(geom)}};
}

/// A square GeoJSON building feature (closed ring) for tiled sources.
json geojson_feature(std::int64_t id, double lon0, double lat0,
                     double size_deg, json props) {
    json ring = json::array();
    ring.push_back({lon0, lat0});
    ring.push_back({lon0 + size_deg, lat0});
    ring.push_back({lon0 + size_deg, lat0 + size_deg});
    ring.push_back({lon0, lat0 + size_deg});
    ring.push_back({lon0, lat0});
    return {{"type", "Feature"},
            {"id", id},
            {"properties", std::move(props)},
            {"geometry",
             {{"type", "Polygon"}, {"coordinates", json::array({ring})}}}};
}

std::string small_dem_asc() {
    return "ncols 4\n"
           "nrows 3\n"
           "xllcorner 0\n"
           "yllcorner 0\n"
           "cellsize 10\n"
           "NODATA_value -9999\n"
           "12 11 10 9\n"
           "8 7 6 5\n"
           "4 3 2 1\n";
}

} // namespace

TEST_CASE("ways response is converted to footprints with heights carried through") {
    ScopedCacheDir cache;
    const auto region = gert::geo::GeoRegion::from_corners(-0.001, 0.001,
                                                           -0.001, 0.001);

    json elements = json::array();
    // Explicit height tag, a levels tag, and a bare building.
    elements.push_back(way_element(101, -0.0008, 0.0002, 0.0002,
                                   {{"building", "yes"}, {"height", "10"}}));
    elements.push_back(way_element(102, 0.0001, -0.0004, 0.0002,
                                   {{"building", "yes"},
                                    {"building:levels", "4"}}));
    elements.push_back(way_element(103, 0.0005, 0.0004, 0.0002,
                                   {{"building", "yes"}}));
    const std::string fixture = json{{"elements", elements}}.dump();

    std::atomic<int> requests{0};
    std::string seen_query;
    LocalServer server;
    server.svr.Post("/api", [&](const httplib::Request& req,
                                httplib::Response& res) {
        ++requests;
        seen_query = req.get_param_value("data");
        res.set_content(fixture, "application/json");
    });
    server.start();

    FetchSource src;
    src.kind = SourceKind::osm_overpass;
    src.endpoint = server.base() + "/api";

    const auto result = gert::fetch::fetch_footprints(src, region);
    CHECK(requests.load() == 1);
    CHECK_FALSE(result.from_cache);
    CHECK(result.warning.empty());

    // The query that reached the server selects buildings inside the region.
    CHECK(seen_query.find("way[\"building\"]") != std::string::npos);
    CHECK(seen_query.find("-0.00100000,-0.00100000,0.00100000,0.00100000") !=
          std::string::npos);

    const auto parsed = gert::geo::parse_footprints(result.bytes, region);
    REQUIRE(parsed.footprints.size() == 3);

    // Footprints come back in feature order with fresh sequential ids.
    CHECK(parsed.footprints[0].id == 1);
    CHECK(parsed.footprints[1].id == 2);
    CHECK(parsed.footprints[2].id == 3);
    CHECK(parsed.footprints[0].height_m == doctest::Approx(10.0));
    CHECK(parsed.footprints[1].height_m ==
          doctest::Approx(4 * 3.0)); // levels * meters-per-level
    CHECK(parsed.footprints[2].height_m == doctest::Approx(6.0)); // default
    for (const auto& fp : parsed.footprints) CHECK(fp.outer_ring.size() >= 4);
}

TEST_CASE("second fetch of the same region is served from the cache") {
    ScopedCacheDir cache;
    const auto region = gert::geo::GeoRegion::from_corners(-0.001, 0.001,
                                                           -0.001, 0.001);

    json elements = json::array();
    elements.push_back(way_element(7, -0.0002, -0.0002, 0.0002,
                                   {{"building", "yes"}}));
    const std::string fixture = json{{"elements", elements}}.dump();

    std::atomic<int> requests{0};
    LocalServer server;
    server.svr.Post("/api", [&](const httplib::Request&, httplib::Response& res) {
        ++requests;
        res.set_content(fixture, "application/json");
    });
    server.start();

    FetchSource src;
    src.kind = SourceKind::osm_overpass;
    src.endpoint = server.base() + "/api";

    const auto first = gert::fetch::fetch_footprints(src, region);
    CHECK_FALSE(first.from_cache);
    CHECK(requests.load() == 1);

    const auto entry = gert::fetch::cache_path(src, region);
    CHECK(std::filesystem::exists(entry));
    // The entry lives under the redirected cache root.
    CHECK(entry.parent_path() == cache.dir);

    const auto second = gert::fetch::fetch_footprints(src, region);
    CHECK(second.from_cache);
    CHECK(second.bytes == first.bytes);
    CHECK(requests.load() == 1); // no extra network traffic

    // A different region misses the cache and hits the network again.
    const auto other = gert::geo::GeoRegion::from_corners(-0.002, 0.002,
                                                          -0.002, 0.002);
    CHECK(gert::fetch::cache_path(src, other) != entry);
    const auto third = gert::fetch::fetch_footprints(src, other);
    CHECK_FALSE(third.from_cache);
    CHECK(requests.load() == 2);
}

TEST_CASE("empty footprint responses produce a warning but still succeed") {
    ScopedCacheDir cache;
    const auto region = gert::geo::GeoRegion::from_corners(10.0, 10.001,
                                                           20.0, 20.001);
    LocalServer server;
    server.svr.Post("/api", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(json{{"elements", json::array()}}.dump(),
                        "application/json");
    });
    server.start();

    FetchSource src;
    src.kind = SourceKind::osm_overpass;
    src.endpoint = server.base() + "/api";

    const auto result = gert::fetch::fetch_footprints(src, region);
    CHECK_FALSE(result.warning.empty());
    CHECK(result.warning.find("10.0") != std::string::npos);
    const auto parsed = gert::geo::parse_footprints(result.bytes, region);
    CHECK(parsed.footprints.empty());
    // The empty result is cached like any other.
    CHECK(std::filesystem::exists(gert::fetch::cache_path(src, region)));
}

TEST_CASE("tiled footprint source concatenates per-tile collections") {
    ScopedCacheDir cache;
    // Straddles the prime meridian within one tile row: exactly two tiles.
    const auto region = gert::geo::GeoRegion::from_corners(0.1, 0.2, -0.1, 0.1);
    const auto keys = gert::fetch::region_quadkeys(region, 9);
    REQUIRE(keys.size() == 2);

    json west = {{"type", "FeatureCollection"},
                 {"features",
                  json::array({geojson_feature(1, -0.05, 0.15, 0.0002,
                                               {{"height", 12.0}}),
                               geojson_feature(2, -0.05, 0.12, 0.0002,
                                               {{"height", 9.0}})})}};
    json east = {{"type", "FeatureCollection"},
                 {"features",
                  json::array({geojson_feature(3, 0.05, 0.15, 0.0002,
                                               {{"height", 15.0}})})}};
    // West of the meridian sorts first because its tile x is smaller and the
    // two keys share every other digit.
    std::map<std::string, std::string> tiles{{keys[0], west.dump()},
                                             {keys[1], east.dump()}};

    std::atomic<int> requests{0};
    std::vector<std::string> asked;
    LocalServer server;
    server.svr.Get(R"(/tiles/(\d+))", [&](const httplib::Request& req,
                                          httplib::Response& res) {
        ++requests;
        const std::string key = req.matches[1];
        asked.push_back(key);
        auto it = tiles.find(key);
        if (it == tiles.end()) {
            res.status = 404;
            return;
        }
        res.set_content(it->second, "application/json");
    });
    server.start();

    FetchSource src;
    src.kind = SourceKind::ms_footprints;
    src.endpoint = server.base() + "/tiles/{quadkey}";

    const auto result = gert::fetch::fetch_footprints(src, region);
    CHECK(requests.load() == 2);
    REQUIRE(asked.size() == 2);
    CHECK(asked[0] == keys[0]);
    CHECK(asked[1] == keys[1]);

    const json merged = json::parse(result.bytes);
    REQUIRE(merged.at("features").size() == 3);

    const auto parsed = gert::geo::parse_footprints(result.bytes, region);
    REQUIRE(parsed.footprints.size() == 3);
    // Tiles are concatenated in key order, so the east-tile feature is last.
    CHECK(parsed.footprints[2].height_m == doctest::Approx(15.0));

    // Cached on the second call, without touching the server.
    const auto again = gert::fetch::fetch_footprints(src, region);
    CHECK(again.from_cache);
    CHECK(again.bytes == result.bytes);
    CHECK(requests.load() == 2);
}

TEST_CASE("elevation fetch substitutes region bounds and validates the grid") {
    ScopedCacheDir cache;
    const auto region = gert::geo::GeoRegion::from_corners(-0.001, 0.001,
                                                           -0.001, 0.001);

    std::atomic<int> requests{0};
    LocalServer server;
    server.svr.Get("/dem", [&](const httplib::Request& req,
                               httplib::Response& res) {
        ++requests;
        CHECK(req.get_param_value("s") == "-0.00100000");
        CHECK(req.get_param_value("n") == "0.00100000");
        CHECK(req.get_param_value("w") == "-0.00100000");
        CHECK(req.get_param_value("e") == "0.00100000");
        res.set_content(small_dem_asc(), "text/plain");
    });
    server.start();

    FetchSource src;
    src.kind = SourceKind::usgs_dem;
    src.endpoint = server.base() +
                   "/dem?s={lat_min}&n={lat_max}&w={lon_min}&e={lon_max}";

    const auto result = gert::fetch::fetch_dem(src, region);
    CHECK(requests.load() == 1);
    CHECK_FALSE(result.from_cache);

    const auto dem = gert::geo::parse_dem(result.bytes, region);
    CHECK(dem.grid.ncols == 4);
    CHECK(dem.grid.nrows == 3);
    CHECK(dem.grid.cell_size_m == doctest::Approx(10.0));
    // Row 0 is the southernmost row of the raster.
    CHECK(dem.grid.at(0, 0) == doctest::Approx(4.0));
    CHECK(dem.grid.at(2, 3) == doctest::Approx(9.0));

    const auto cached = gert::fetch::fetch_dem(src, region);
    CHECK(cached.from_cache);
    CHECK(cached.bytes == result.bytes);
    CHECK(requests.load() == 1);

    const auto entry = gert::fetch::cache_path(src, region);
    CHECK(entry.extension() == ".asc");
    CHECK(std::filesystem::exists(entry));
}

TEST_CASE("elevation payloads that are not usable grids are rejected uncached") {
    ScopedCacheDir cache;
    const auto region = gert::geo::GeoRegion::from_corners(-0.001, 0.001,
                                                           -0.001, 0.001);

    LocalServer server;
    server.svr.Get("/bad", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html>service unavailable</html>", "text/html");
    });
    server.svr.Get("/empty", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("", "text/plain");
    });
    server.start();

    FetchSource src;
    src.kind = SourceKind::usgs_dem;

    src.endpoint = server.base() + "/bad";
    CHECK_THROWS_WITH_AS(gert::fetch::fetch_dem(src, region),
                         doctest::Contains("not a usable grid"),
                         gert::FetchError);
    CHECK_FALSE(std::filesystem::exists(gert::fetch::cache_path(src, region)));

    src.endpoint = server.base() + "/empty";
    CHECK_THROWS_WITH_AS(gert::fetch::fetch_dem(src, region),
                         doctest::Contains("no data"), gert::FetchError);
    CHECK_FALSE(std::filesystem::exists(gert::fetch::cache_path(src, region)));
}

TEST_CASE("unreachable endpoints fail after the configured retries") {
    ScopedCacheDir cache;
    const auto region = gert::geo::GeoRegion::from_corners(-0.001, 0.001,
                                                           -0.001, 0.001);

    // Grab an ephemeral port, then shut the server down so nothing listens.
    int dead_port = 0;
    {
        LocalServer server;
        server.start();
        dead_port = server.port;
    }

    FetchSource src;
    src.kind = SourceKind::osm_overpass;
    src.endpoint = "http://127.0.0.1:" + std::to_string(dead_port) + "/api";
    src.retry_count = 1;
    src.timeout_s = 2.0;

    try {
        gert::fetch::fetch_footprints(src, region);
        FAIL("expected a fetch error");
    } catch (const gert::FetchError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2 attempt") != std::string::npos);
        CHECK(msg.find("transport error") != std::string::npos);
        CHECK(msg.find(src.endpoint) != std::string::npos);
    }
}

TEST_CASE("client errors are reported without pointless retries") {
    ScopedCacheDir cache;
    const auto region = gert::geo::GeoRegion::from_corners(-0.001, 0.001,
                                                           -0.001, 0.001);

    std::atomic<int> requests{0};
    LocalServer server;
    // Count requests before routing (and therefore before the response is
    // written) so the counter is settled once the client sees the reply.
    // No route matches the endpoint below, so every request yields 404.
    server.svr.set_pre_routing_handler(
        [&](const httplib::Request&, httplib::Response&) {
            ++requests;
            return httplib::Server::HandlerResponse::Unhandled;
        });
    server.svr.Post("/real", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{}", "application/json");
    });
    server.start();

    FetchSource src;
    src.kind = SourceKind::osm_overpass;
    src.endpoint = server.base() + "/missing";
    src.retry_count = 3;

    try {
        gert::fetch::fetch_footprints(src, region);
        FAIL("expected a fetch error");
    } catch (const gert::FetchError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("HTTP status 404") != std::string::npos);
        CHECK(msg.find("1 attempt") != std::string::npos);
    }
    CHECK(requests.load() == 1); // 4xx is never retried
}

TEST_CASE("source validation and kind mismatches are rejected") {
    const auto region = gert::geo::GeoRegion::from_corners(-0.001, 0.001,
                                                           -0.001, 0.001);

    FetchSource src;
    src.kind = SourceKind::osm_overpass;
    src.endpoint = "http://example.invalid/api";
    CHECK_NOTHROW(src.validate());

    FetchSource bad = src;
    bad.endpoint.clear();
    CHECK_THROWS_AS(bad.validate(), gert::Error);

    bad = src;
    bad.retry_count = 6;
    CHECK_THROWS_AS(bad.validate(), gert::Error);
    bad.retry_count = -1;
    CHECK_THROWS_AS(bad.validate(), gert::Error);

    bad = src;
    bad.timeout_s = 0.0;
    CHECK_THROWS_AS(bad.validate(), gert::Error);

    FetchSource dem;
    dem.kind = SourceKind::usgs_dem;
    dem.endpoint = "http://example.invalid/dem";
    CHECK_THROWS_AS(gert::fetch::fetch_footprints(dem, region), gert::Error);
    CHECK_THROWS_AS(gert::fetch::fetch_dem(src, region), gert::Error);

    // Endpoints must carry a scheme; this is caught before any socket work.
    ScopedCacheDir cache;
    FetchSource relative;
    relative.kind = SourceKind::usgs_dem;
    relative.endpoint = "127.0.0.1/dem";
    CHECK_THROWS_WITH_AS(gert::fetch::fetch_dem(relative, region),
                         doctest::Contains("absolute URL"), gert::Error);
}

TEST_CASE("quadkeys follow the quadrant numbering and nest by level") {
    using gert::fetch::quadkey;

    // Level 1 splits the world at the equator and the prime meridian:
    // northwest 0, northeast 1, southwest 2, southeast 3.
    CHECK(quadkey(0.1, -0.1, 1) == "0");
    CHECK(quadkey(0.1, 0.1, 1) == "1");
    CHECK(quadkey(-0.1, -0.1, 1) == "2");
    CHECK(quadkey(-0.1, 0.1, 1) == "3");

    // Nesting: near the origin inside the northeast quadrant lands in that
    // quadrant's southwest child.
    CHECK(quadkey(0.1, 0.1, 2) == "12");

    // Level-3 hand oracle: lon -20 deg -> tile x 3, lat -50 deg -> tile y 5,
    // and tile (3, 5) interleaves to "213".
    CHECK(quadkey(-50.0, -20.0, 3) == "213");

    // One digit per level.
    for (int level = 1; level <= 23; ++level)
        CHECK(quadkey(47.6, -122.3, level).size() ==
              static_cast<size_t>(level));

    // Latitudes beyond the projection clamp map to the edge tiles rather
    // than throwing.
    CHECK(quadkey(89.9, 0.1, 1) == "1");
    CHECK(quadkey(-89.9, 0.1, 1) == "3");

    CHECK_THROWS_AS(quadkey(0.0, 0.0, 0), gert::Error);
    CHECK_THROWS_AS(quadkey(0.0, 0.0, 24), gert::Error);
}

TEST_CASE("region quadkeys cover the region corners exactly once") {
    using gert::fetch::quadkey;
    using gert::fetch::region_quadkeys;

    // A region inside a single level-9 tile yields that one key.
    const auto tiny = gert::geo::GeoRegion::from_corners(0.15, 0.1501,
                                                         0.05, 0.0501);
    const auto one = region_quadkeys(tiny, 9);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == quadkey(0.15005, 0.05005, 9));

    // Straddling both axes near the origin yields the 2x2 block of tiles.
    const auto cross = gert::geo::GeoRegion::from_corners(-0.1, 0.1, -0.1, 0.1);
    const auto four = region_quadkeys(cross, 9);
    REQUIRE(four.size() == 4);
    CHECK(std::is_sorted(four.begin(), four.end()));
    CHECK(std::adjacent_find(four.begin(), four.end()) == four.end());
    for (const std::string& key : four) CHECK(key.size() == 9);

    const auto contains = [&](const std::string& key) {
        return std::find(four.begin(), four.end(), key) != four.end();
    };
    CHECK(contains(quadkey(cross.lat_max, cross.lon_min, 9))); // NW
    CHECK(contains(quadkey(cross.lat_max, cross.lon_max, 9))); // NE
    CHECK(contains(quadkey(cross.lat_min, cross.lon_min, 9))); // SW
    CHECK(contains(quadkey(cross.lat_min, cross.lon_max, 9))); // SE

    // The default level matches the explicit one used by tiled fetching.
    CHECK(region_quadkeys(cross) == four);
}

TEST_CASE("cache locations honour the environment override") {
    ScopedCacheDir cache;
    CHECK(gert::fetch::cache_dir() == cache.dir);

    FetchSource osm;
    osm.kind = SourceKind::osm_overpass;
    osm.endpoint = "http://example.invalid/api";
    const auto region = gert::geo::GeoRegion::from_corners(1.0, 2.0, 3.0, 4.0);

    const auto path = gert::fetch::cache_path(osm, region);
    CHECK(path.parent_path() == cache.dir);
    CHECK(path.filename().string().rfind("osm_overpass_", 0) == 0);
    CHECK(path.extension() == ".json");

    // Distinct endpoints and regions key distinct entries.
    FetchSource other = osm;
    other.endpoint = "http://example.invalid/api2";
    CHECK(gert::fetch::cache_path(other, region) != path);
    const auto shifted = gert::geo::GeoRegion::from_corners(1.0, 2.0, 3.0, 4.1);
    CHECK(gert::fetch::cache_path(osm, shifted) != path);
}

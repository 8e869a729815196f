// SPDX-License-Identifier: Apache-2.0
#include "gert/geo/esri_grid.hpp"

#include "gert/error.hpp"
#include "gert/geo/projection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace gert::geo {

namespace {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.emplace_back(text.substr(start, i - start));
    }
    return out;
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_number(const std::string& tok, const char* what) {
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw ParseError(std::string("invalid ") + what + ": " + tok);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(std::string("invalid ") + what + ": " + tok);
    }
}

/// Fill NODATA cells from the nearest valid cell (Euclidean distance over
/// grid indices; ties resolved toward the smaller row-major index).
int fill_nodata(TerrainGrid& grid, const std::vector<bool>& valid) {
    const int nr = grid.nrows;
    const int nc = grid.ncols;
    bool any_valid = false;
    for (bool v : valid) {
        if (v) { any_valid = true; break; }
    }
    if (!any_valid) throw ParseError("DEM has no valid samples");

    int filled = 0;
    std::vector<double> out = grid.elevation;
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nc; ++j) {
            if (valid[static_cast<size_t>(i) * nc + j]) continue;
            long best_d2 = std::numeric_limits<long>::max();
            long best_idx = -1;
            const int rmax = std::max(std::max(i, nr - 1 - i), std::max(j, nc - 1 - j));
            for (int r = 1; r <= rmax; ++r) {
                if (best_idx >= 0 && best_d2 < static_cast<long>(r) * r) break;
                auto consider = [&](int ii, int jj) {
                    if (ii < 0 || ii >= nr || jj < 0 || jj >= nc) return;
                    const long idx = static_cast<long>(ii) * nc + jj;
                    if (!valid[static_cast<size_t>(idx)]) return;
                    const long d2 = static_cast<long>(ii - i) * (ii - i) +
                                    static_cast<long>(jj - j) * (jj - j);
                    if (d2 < best_d2 || (d2 == best_d2 && idx < best_idx)) {
                        best_d2 = d2;
                        best_idx = idx;
                    }
                };
                for (int jj = j - r; jj <= j + r; ++jj) {
                    consider(i - r, jj);
                    consider(i + r, jj);
                }
                for (int ii = i - r + 1; ii <= i + r - 1; ++ii) {
                    consider(ii, j - r);
                    consider(ii, j + r);
                }
            }
            out[static_cast<size_t>(i) * nc + j] = grid.elevation[static_cast<size_t>(best_idx)];
            ++filled;
        }
    }
    grid.elevation = std::move(out);
    return filled;
}

bool looks_geographic(double xll, double yll, int nrows, int ncols, double cellsize) {
    if (cellsize > 0.1) return false;
    if (std::abs(xll) > 360.0 || std::abs(xll + ncols * cellsize) > 360.0) return false;
    if (yll < -90.0 || yll + nrows * cellsize > 90.0) return false;
    return true;
}

/// Header + body parse into the file's native frame (degrees or meters),
/// with NODATA filling. The caller decides whether resampling is needed.
DemParseResult parse_raw(std::string_view esri_ascii) {
    const std::vector<std::string> tokens = tokenize(esri_ascii);
    std::map<std::string, double> header;
    size_t pos = 0;
    while (pos + 1 < tokens.size() &&
           std::isalpha(static_cast<unsigned char>(tokens[pos][0]))) {
        const std::string key = to_lower(tokens[pos]);
        header[key] = parse_number(tokens[pos + 1], ("header value for " + key).c_str());
        pos += 2;
    }

    auto require = [&](const char* key) {
        auto it = header.find(key);
        if (it == header.end()) throw ParseError(std::string("missing header key: ") + key);
        return it->second;
    };

    const int ncols = static_cast<int>(require("ncols"));
    const int nrows = static_cast<int>(require("nrows"));
    const double cellsize = require("cellsize");
    if (ncols < 2 || nrows < 2) throw ParseError("DEM must be at least 2x2 cells");
    if (cellsize <= 0) throw ParseError("DEM cellsize must be positive");

    double xll, yll;
    if (header.count("xllcorner")) {
        xll = header["xllcorner"];
    } else if (header.count("xllcenter")) {
        xll = header["xllcenter"] - cellsize / 2.0;
    } else {
        throw ParseError("missing header key: xllcorner");
    }
    if (header.count("yllcorner")) {
        yll = header["yllcorner"];
    } else if (header.count("yllcenter")) {
        yll = header["yllcenter"] - cellsize / 2.0;
    } else {
        throw ParseError("missing header key: yllcorner");
    }

    const bool has_nodata = header.count("nodata_value") > 0;
    const double nodata = has_nodata ? header["nodata_value"] : -9999.0;

    const size_t expected = static_cast<size_t>(nrows) * static_cast<size_t>(ncols);
    const size_t got = tokens.size() - pos;
    if (got != expected) {
        throw ParseError("DEM body has " + std::to_string(got) + " values, expected " +
                         std::to_string(expected));
    }

    // File rows run north to south; storage rows run south to north.
    TerrainGrid grid;
    grid.ncols = ncols;
    grid.nrows = nrows;
    grid.cell_size_m = cellsize; // provisional; replaced when resampling degrees
    grid.x0 = xll;
    grid.y0 = yll;
    grid.elevation.resize(expected);
    std::vector<bool> valid(expected, true);
    bool any_nodata = false;
    for (int file_row = 0; file_row < nrows; ++file_row) {
        const int i = nrows - 1 - file_row;
        for (int j = 0; j < ncols; ++j) {
            const double v = parse_number(tokens[pos++], "elevation");
            const size_t idx = static_cast<size_t>(i) * ncols + j;
            grid.elevation[idx] = v;
            if (has_nodata && v == nodata) {
                valid[idx] = false;
                any_nodata = true;
            }
        }
    }

    DemParseResult result;
    result.nodata_filled = any_nodata ? fill_nodata(grid, valid) : 0;
    result.grid = std::move(grid);
    return result;
}

bool looks_geographic(const TerrainGrid& g) {
    return looks_geographic(g.x0, g.y0, g.nrows, g.ncols, g.cell_size_m);
}

} // namespace

DemParseResult parse_dem(std::string_view esri_ascii, const GeoRegion& region) {
    region.validate();

    DemParseResult result = parse_raw(esri_ascii);
    if (!looks_geographic(result.grid)) return result;
    const TerrainGrid& grid = result.grid;
    const double xll = grid.x0;
    const double yll = grid.y0;
    const double cellsize = grid.cell_size_m;
    const int ncols = grid.ncols;
    const int nrows = grid.nrows;

    // Geographic grid: project through the region origin onto a square
    // metric lattice whose spacing matches the latitude step of the source.
    const double lon_min = xll;
    const double lon_max = xll + ncols * cellsize;
    const double lat_min = yll;
    const double lat_max = yll + nrows * cellsize;
    const Point2 lo = latlon_to_local(lat_min, lon_min, region.origin_lat, region.origin_lon);
    const Point2 hi = latlon_to_local(lat_max, lon_max, region.origin_lat, region.origin_lon);

    const double cell_m = cellsize * (std::numbers::pi / 180.0) * kEarthRadiusM;
    TerrainGrid metric;
    metric.cell_size_m = cell_m;
    metric.ncols = std::max(2, static_cast<int>(std::llround((hi.x - lo.x) / cell_m)));
    metric.nrows = std::max(2, static_cast<int>(std::llround((hi.y - lo.y) / cell_m)));
    metric.x0 = lo.x;
    metric.y0 = lo.y;
    metric.elevation.resize(static_cast<size_t>(metric.nrows) * metric.ncols);
    for (int i = 0; i < metric.nrows; ++i) {
        for (int j = 0; j < metric.ncols; ++j) {
            const double x = metric.x0 + (j + 0.5) * cell_m;
            const double y = metric.y0 + (i + 0.5) * cell_m;
            double lat, lon;
            local_to_latlon(x, y, region.origin_lat, region.origin_lon, lat, lon);
            // Bilinear sample of the degree grid; TerrainGrid::sample clamps
            // at the boundary, which is what we want at the rim.
            metric.elevation[static_cast<size_t>(i) * metric.ncols + j] = grid.sample(lon, lat);
        }
    }
    result.grid = std::move(metric);
    return result;
}

DemParseResult parse_dem_local(std::string_view esri_ascii) {
    DemParseResult result = parse_raw(esri_ascii);
    if (looks_geographic(result.grid))
        throw ParseError(
            "elevation grid is in geographic degrees and needs a region");
    return result;
}

std::string write_esri_ascii(const TerrainGrid& grid) {
    std::string out;
    out.reserve(static_cast<size_t>(grid.nrows) * grid.ncols * 12 + 128);
    char buf[64];
    auto emit = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof(buf), fmt, args...);
        out += buf;
    };
    emit("ncols %d\n", grid.ncols);
    emit("nrows %d\n", grid.nrows);
    emit("xllcorner %.17g\n", grid.x0);
    emit("yllcorner %.17g\n", grid.y0);
    emit("cellsize %.17g\n", grid.cell_size_m);
    for (int file_row = 0; file_row < grid.nrows; ++file_row) {
        const int i = grid.nrows - 1 - file_row;
        for (int j = 0; j < grid.ncols; ++j) {
            emit(j == 0 ? "%.17g" : " %.17g",
                 grid.elevation[static_cast<size_t>(i) * grid.ncols + j]);
        }
        out += '\n';
    }
    return out;
}

} // namespace gert::geo

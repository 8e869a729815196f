// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace gert::geo {

/// Geographic rectangle with the anchor of the local metric frame.
/// The origin defaults to the region centroid and must lie inside the region.
struct GeoRegion {
    double lat_min = 0.0;
    double lat_max = 0.0;
    double lon_min = 0.0;
    double lon_max = 0.0;
    double origin_lat = 0.0;
    double origin_lon = 0.0;

    static GeoRegion from_corners(double lat_min, double lat_max,
                                  double lon_min, double lon_max);
    void validate() const;
};

/// 2D point in the local metric frame.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
    constexpr bool operator==(const Point2&) const = default;
};

enum class HeightSource { explicit_value, levels_rule, default_rule };

/// One building outline in the local frame. The outer ring is stored
/// counter-clockwise without the closing vertex.
struct BuildingFootprint {
    std::int64_t id = 0;
    std::vector<Point2> outer_ring;
    double height_m = 0.0;
    HeightSource height_source = HeightSource::default_rule;
};

/// Regular elevation raster in the local frame. Row 0 is the southernmost
/// row; sample (row, col) sits at the center of its cell, i.e. at
/// (x0 + (col + 0.5) * cell, y0 + (row + 0.5) * cell).
struct TerrainGrid {
    int ncols = 0;
    int nrows = 0;
    double cell_size_m = 0.0;
    double x0 = 0.0; // lower-left corner of the raster extent
    double y0 = 0.0;
    std::vector<double> elevation; // row-major, nrows * ncols

    double at(int row, int col) const { return elevation[static_cast<size_t>(row) * ncols + col]; }
    double& at(int row, int col) { return elevation[static_cast<size_t>(row) * ncols + col]; }

    double x_min() const { return x0; }
    double y_min() const { return y0; }
    double x_max() const { return x0 + ncols * cell_size_m; }
    double y_max() const { return y0 + nrows * cell_size_m; }

    /// Bilinear elevation sample at an arbitrary point, clamped to the
    /// cell-center lattice at the raster edges.
    double sample(double x, double y) const;
};

/// Signed shoelace area of a ring (positive for counter-clockwise).
double ring_signed_area(const std::vector<Point2>& ring);

/// True if no two non-adjacent edges of the closed ring intersect.
bool ring_is_simple(const std::vector<Point2>& ring);

} // namespace gert::geo

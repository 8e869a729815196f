// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/geo/geo_types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace gert::scene {

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
/// Returns exactly ring.size() - 2 index triples, each wound CCW.
/// Throws GeometryError for self-intersecting, clockwise or degenerate
/// rings (no repair is attempted).
std::vector<std::array<std::int32_t, 3>>
triangulate_polygon(const std::vector<geo::Point2>& ring);

} // namespace gert::scene

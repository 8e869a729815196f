// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/vec3.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace gert::rt {

enum class PathKind { line_of_sight, reflection, diffraction };

/// One specular bounce along a reflection path.
struct Reflection {
    int64_t object_id = -1;
    int32_t facet = -1;       // facet index in the acceleration structure
    double incidence_rad = 0; // angle from the surface normal
    Vec3 normal;              // unit surface normal, oriented toward the
                              // incoming ray's side
};

/// The single edge interaction of a diffraction path.
struct Diffraction {
    int64_t object_id = -1;
    int32_t edge = -1;        // edge index in the acceleration structure
    double n_index = 2.0;     // exterior wedge angle / pi
    double phi_in_rad = 0.0;  // source azimuth in the edge frame
    double phi_out_rad = 0.0; // observer azimuth in the edge frame
    double beta0_rad = 0.0;   // cone half-angle between the incident ray
                              // and the edge direction
    Vec3 edge_direction;      // unit edge vector of the frame
    Vec3 tangent_o;           // o-face tangent of the frame
    Vec3 normal_o;            // o-face outward normal of the frame
};

/// One deterministic propagation path from tx to rx. `vertices` runs
/// tx, interaction points..., rx. `amplitude` is the complex path gain
/// (received E-field relative to a 1 m free-space reference, so the
/// power gain is |amplitude|^2); `delay_s` is the geometric length over c.
struct Path {
    PathKind kind = PathKind::line_of_sight;
    std::vector<Vec3> vertices;
    double delay_s = 0.0;
    std::complex<double> amplitude;
    std::vector<Reflection> reflections;    // empty unless kind == reflection
    std::optional<Diffraction> diffraction; // set only for diffraction paths
};

/// Tracing controls. The reflection order is capped at 7; construction of a
/// trace with a larger order is refused.
struct TraceConfig {
    int max_reflection_order = 5;
    bool diffraction_enabled = true;
    double frequency_hz = 3.5e9;
};

/// All paths found between one tx/rx pair, with the exact configuration
/// that produced them.
struct PathSet {
    Vec3 tx;
    Vec3 rx;
    TraceConfig config;
    std::vector<Path> paths;
};

} // namespace gert::rt

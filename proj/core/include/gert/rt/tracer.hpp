// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/rt/bvh.hpp"
#include "gert/rt/path.hpp"

#include <vector>

namespace gert::scene {
struct Scene;
}

namespace gert::rt {

/// Image tree for one transmitter: every surviving facet sequence up to the
/// configured reflection order, with the cumulative image point and a
/// conservative bounding frustum per node. Built once per transmitter and
/// reused across receivers.
class TxImageTree {
public:
    struct Plane {
        Vec3 n;
        double c = 0.0; // inside when n . x - c >= 0
    };
    struct Node {
        int32_t facet = -1;
        int32_t parent = -1;
        int32_t depth = 1;
        Vec3 image;                 // tx mirrored through the node's facet chain
        std::vector<Plane> frustum; // conservative region reachable after the
                                    // node's reflection (window + side planes)
    };

    Vec3 tx;
    std::vector<Node> nodes;
};

/// Enumerate candidate specular sequences from `tx` up to
/// cfg.max_reflection_order bounces, pruned by conservative beam frusta.
TxImageTree expand_images(const AccelStructure& accel, const Vec3& tx,
                          const TraceConfig& cfg);

/// All deterministic paths between tx and rx: the unobstructed line of
/// sight, specular reflections up to the configured order (image method over
/// the merged facets), and single-edge diffractions when enabled. Reflection
/// and diffraction are never mixed on one path. Throws GeometryError when
/// cfg.max_reflection_order exceeds 7 or is negative.
PathSet find_paths(const scene::Scene& scene, const AccelStructure& accel,
                   const Vec3& tx, const Vec3& rx, const TraceConfig& cfg);

/// Same, but reusing a prebuilt image tree for the transmitter (the tree
/// must have been built with the same accel and config).
PathSet find_paths(const scene::Scene& scene, const AccelStructure& accel,
                   const TxImageTree& tree, const Vec3& rx,
                   const TraceConfig& cfg);

/// Fill in delay_s and amplitude for a geometrically complete path. The
/// antennas are ideal vertically polarised isotropic radiators; amplitude is
/// lambda/(4 pi d) times the product of interaction coefficients, with
/// phase e^{-j 2 pi d / lambda} (e^{+j omega t} convention).
void evaluate_path(Path& path, const scene::Scene& scene, const TraceConfig& cfg);

} // namespace gert::rt

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/perturb/rng.hpp"
#include "gert/scene/scene.hpp"

#include <cstdint>

namespace gert::perturb {

/// Which properties a perturbation family touches.
enum class PerturbKind { material, position, height, height_position, all };

/// Seeded Gaussian perturbation family.
struct PerturbationSpec {
    PerturbKind kind = PerturbKind::all;
    double sigma_height_m = 1.0;     // roof-level shift std
    double sigma_pos_m = 0.4;        // rigid x/y translation std, per axis
    double material_rel_sigma = 0.10; // material noise std as a fraction
    int count = 50;                  // perturbations per family (K)
    std::uint64_t master_seed = 0;
    bool per_vertex = false;         // diagnostic mode: independent draws per
                                     // vertex instead of rigid per-building
                                     // moves (leaves building metadata alone)

    void validate() const; // sigmas >= 0, count >= 1
};

/// Counters for physical-range clamping during one perturbation.
struct PerturbStats {
    int height_clamps = 0; // heights pinned at the 0.5 m floor
    int eps_clamps = 0;    // relative permittivities pinned at 1
    int sigma_clamps = 0;  // conductivities pinned at 0
};

/// Deep-copy `scene` with the spec's perturbation `index` applied to every
/// building (never the terrain). Heights shift all roof-level vertices by
/// one N(0, sigma_h^2) draw per building and clamp the result to >= 0.5 m;
/// positions translate buildings rigidly in x/y; materials jitter eps_r and
/// sigma by 10% relative noise, clamped to eps_r >= 1, sigma >= 0. All
/// randomness is keyed by (master_seed, tx_id, index, building, channel),
/// so calls are order- and thread-independent. The input is not modified.
scene::Scene apply_perturbation(const scene::Scene& scene,
                                const PerturbationSpec& spec,
                                std::uint64_t index,
                                std::uint64_t tx_id = 0,
                                PerturbStats* stats = nullptr);

const char* to_string(PerturbKind kind);

} // namespace gert::perturb

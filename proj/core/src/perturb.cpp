// SPDX-License-Identifier: Apache-2.0
#include "gert/perturb/perturb.hpp"

#include "gert/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gert::perturb {

namespace {

bool wants_height(PerturbKind k) {
    return k == PerturbKind::height || k == PerturbKind::height_position ||
           k == PerturbKind::all;
}
bool wants_position(PerturbKind k) {
    return k == PerturbKind::position || k == PerturbKind::height_position ||
           k == PerturbKind::all;
}
bool wants_material(PerturbKind k) {
    return k == PerturbKind::material || k == PerturbKind::all;
}

void shift_height(scene::Scene& s, std::int64_t id, scene::BuildingInfo& info,
                  double delta, PerturbStats& stats) {
    double new_height = info.height_m + delta;
    if (new_height < 0.5) {
        new_height = 0.5;
        ++stats.height_clamps;
    }
    const double old_top = info.base_elevation_m + info.height_m;
    const double dz = new_height - info.height_m;
    scene::TriangleMesh* mesh = s.mesh_for(id);
    if (!mesh) throw GeometryError("perturb: building " + std::to_string(id) + " has no mesh");
    for (auto& v : mesh->vertices)
        if (std::abs(v.z - old_top) < 1e-9) v.z += dz;
    info.height_m = new_height;
}

void translate_building(scene::Scene& s, std::int64_t id,
                        scene::BuildingInfo& info, double dx, double dy) {
    scene::TriangleMesh* mesh = s.mesh_for(id);
    if (!mesh) throw GeometryError("perturb: building " + std::to_string(id) + " has no mesh");
    for (auto& v : mesh->vertices) {
        v.x += dx;
        v.y += dy;
    }
    for (auto& p : info.footprint.outer_ring) {
        p.x += dx;
        p.y += dy;
    }
}

} // namespace

void PerturbationSpec::validate() const {
    if (sigma_height_m < 0.0 || sigma_pos_m < 0.0 || material_rel_sigma < 0.0)
        throw Error("perturbation: sigmas must be non-negative");
    if (count < 1) throw Error("perturbation: count must be at least 1");
}

scene::Scene apply_perturbation(const scene::Scene& scene,
                                const PerturbationSpec& spec,
                                std::uint64_t index, std::uint64_t tx_id,
                                PerturbStats* stats) {
    spec.validate();
    if (index >= static_cast<std::uint64_t>(spec.count))
        throw Error("perturbation: index " + std::to_string(index) +
                    " out of range for count " + std::to_string(spec.count));

    scene::Scene out = scene; // deep copy; terrain untouched below
    PerturbStats local;
    PerturbStats& st = stats ? *stats : local;

    for (auto& [id, info] : out.buildings) {
        if (wants_height(spec.kind)) {
            NormalStream rng(spec.master_seed, tx_id, index, id, Channel::height);
            if (!spec.per_vertex) {
                shift_height(out, id, info, spec.sigma_height_m * rng.next_normal(), st);
            } else {
                // Diagnostic mode: each roof-level vertex gets its own draw.
                const double old_top = info.base_elevation_m + info.height_m;
                scene::TriangleMesh* mesh = out.mesh_for(id);
                if (!mesh) throw GeometryError("perturb: building has no mesh");
                for (auto& v : mesh->vertices)
                    if (std::abs(v.z - old_top) < 1e-9)
                        v.z = std::max(info.base_elevation_m + 0.5,
                                       v.z + spec.sigma_height_m * rng.next_normal());
            }
        }
        if (wants_position(spec.kind)) {
            NormalStream rx(spec.master_seed, tx_id, index, id, Channel::pos_x);
            NormalStream ry(spec.master_seed, tx_id, index, id, Channel::pos_y);
            if (!spec.per_vertex) {
                translate_building(out, id, info,
                                   spec.sigma_pos_m * rx.next_normal(),
                                   spec.sigma_pos_m * ry.next_normal());
            } else {
                scene::TriangleMesh* mesh = out.mesh_for(id);
                if (!mesh) throw GeometryError("perturb: building has no mesh");
                for (auto& v : mesh->vertices) {
                    v.x += spec.sigma_pos_m * rx.next_normal();
                    v.y += spec.sigma_pos_m * ry.next_normal();
                }
            }
        }
        if (wants_material(spec.kind)) {
            auto mat = out.materials.find(id);
            if (mat == out.materials.end())
                throw GeometryError("perturb: building " + std::to_string(id) +
                                    " has no material");
            NormalStream re(spec.master_seed, tx_id, index, id, Channel::eps);
            NormalStream rs(spec.master_seed, tx_id, index, id, Channel::sigma);
            double eps = mat->second.eps_r +
                         spec.material_rel_sigma * mat->second.eps_r * re.next_normal();
            if (eps < 1.0) {
                eps = 1.0;
                ++st.eps_clamps;
            }
            double sig = mat->second.sigma_s_per_m +
                         spec.material_rel_sigma * mat->second.sigma_s_per_m *
                             rs.next_normal();
            if (sig < 0.0) {
                sig = 0.0;
                ++st.sigma_clamps;
            }
            mat->second.eps_r = eps;
            mat->second.sigma_s_per_m = sig;
        }
    }
    return out;
}

const char* to_string(PerturbKind kind) {
    switch (kind) {
    case PerturbKind::material: return "material";
    case PerturbKind::position: return "position";
    case PerturbKind::height: return "height";
    case PerturbKind::height_position: return "height_position";
    case PerturbKind::all: return "all";
    }
    return "unknown";
}

} // namespace gert::perturb

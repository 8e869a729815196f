// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/sweep/sweep.hpp"

#include <filesystem>
#include <vector>

namespace gert::sweep {

/// Serialize the receiver lattice (meta line + one row per cell). Doubles
/// are written with 17 significant digits, so read_grid_csv(write_grid_csv(g))
/// reproduces g bit-exactly.
void write_grid_csv(const RxGrid& grid, const std::filesystem::path& file);

/// Inverse of write_grid_csv. Throws IoError on a missing file and
/// ParseError on any malformed content.
RxGrid read_grid_csv(const std::filesystem::path& file);

/// Write one raw_<tx>_<kind>.csv per (tx, kind) study into dir/raw, one
/// row per (draw, cell) in draw-major order. Requires the sweep to have
/// retained its raw samples.
void write_raw_samples(const SweepResult& result,
                       const std::filesystem::path& dir);

/// Load the raw sample matrix (tx-major, spec-minor, as assemble_sweep
/// expects) from dir/raw. Every file must cover exactly
/// spec.count x n_cells rows in draw-major order.
std::vector<std::vector<std::vector<CellSample>>> read_raw_samples(
    const std::filesystem::path& dir, const std::vector<TxSite>& tx_sites,
    const std::vector<perturb::PerturbationSpec>& specs, std::size_t n_cells);

} // namespace gert::sweep

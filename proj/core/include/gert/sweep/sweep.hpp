// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/geo/geo_types.hpp"
#include "gert/metrics/metrics.hpp"
#include "gert/perturb/perturb.hpp"
#include "gert/rt/path.hpp"
#include "gert/scene/scene.hpp"
#include "gert/vec3.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gert::sweep {

/// Receiver lattice: cell centers on a uniform x-y grid, each at a fixed
/// clearance above the local (bilinear) terrain elevation. All cells lie
/// strictly inside the meshed terrain extent.
struct RxGrid {
    std::vector<Vec3> cells; ///< row-major, index = iy * nx + ix
    int nx = 0;
    int ny = 0;
    double spacing_m = 5.0;
    double clearance_m = 1.5;
};

/// Build the receiver lattice over a terrain grid. Cells are placed at
/// spacing/2 offsets inside the meshed extent (the cell-center lattice of
/// the raster), so every receiver sits above actual terrain triangles.
/// Throws Error when the spacing is non-positive or no cell fits.
RxGrid make_rx_grid(const geo::TerrainGrid& terrain, double spacing_m = 5.0,
                    double clearance_m = 1.5);

/// One Monte Carlo draw for one receiver cell.
struct CellSample {
    bool connected = false; ///< link above the power threshold
    bool has_paths = false; ///< at least one propagation path existed
    double pg_db = 0.0;
    double med_ns = 0.0;
    double ds_ns = 0.0;
    double k_db = 0.0;
    bool k_finite = false; ///< K-factor defined and finite
};

/// Censored per-cell statistics over the K perturbation draws.
/// Standard deviations are sample standard deviations (denominator n-1)
/// over connected draws only; the K-factor additionally excludes draws
/// whose K is infinite. A std field is absent when its contributing draw
/// count is below min_samples.
struct CellAggregate {
    int alive_count = 0;
    int outage_count = 0;
    int finite_k_count = 0;
    bool always_dead = false; ///< no paths existed under any draw
    double outage_frequency = 0.0;
    std::optional<double> pg_std_db;
    std::optional<double> med_std_ns;
    std::optional<double> ds_std_ns;
    std::optional<double> k_std_db;
};

CellAggregate aggregate_cells(const std::vector<CellSample>& samples,
                              int min_samples = 2);

/// Aggregated lattice for one (transmitter, perturbation kind) study.
struct CellMetricsGrid {
    RxGrid grid;
    std::vector<CellAggregate> cells;  ///< same indexing as grid.cells
    std::vector<double> distance_m;    ///< horizontal distance to the tx
};

/// Distance-binned means of the per-cell standard deviations. A field's
/// bin mean is taken over cells where that field is present; bins fed by
/// fewer than 10 cells are flagged low-confidence for that field.
struct ProfileBin {
    double d_lo_m = 0.0;
    double d_hi_m = 0.0;
    std::array<std::optional<double>, 4> mean; ///< pg, med, ds, k
    std::array<int, 4> count{0, 0, 0, 0};
    static constexpr int kConfidentCells = 10;
    bool low_confidence(int metric) const { return count[static_cast<size_t>(metric)] < kConfidentCells; }
};

std::vector<ProfileBin> distance_profile(const CellMetricsGrid& grid_result,
                                         double bin_width_m = 25.0);

/// Point in metric space for dispersion analysis: the four std fields
/// plus the outage frequency for one (tx, cell).
using MetricPoint = std::array<std::optional<double>, 5>;

/// Names of the five dispersion metrics, indexable by MetricPoint slot.
extern const std::array<const char*, 5> kMetricNames;

/// Pairwise dispersion between two metrics over pooled (tx, cell) points:
/// Pearson correlation, mean point, and the 2-sigma covariance ellipse
/// (semi-axes = 2*sqrt(eigenvalue) of the sample covariance, angle of the
/// major axis from +x). A pair with fewer than 3 complete observations is
/// marked undefined.
struct DispersionPair {
    perturb::PerturbKind kind = perturb::PerturbKind::all;
    int metric_x = 0;
    int metric_y = 1;
    std::size_t n = 0;
    bool defined = false;
    double pearson_r = 0.0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double angle_rad = 0.0;
};

/// All 10 unordered metric pairs for one pooled point cloud.
std::vector<DispersionPair> dispersion_pairs(const std::vector<MetricPoint>& points);

/// Histogram over cells of their outage count in 0..K. Cells that had no
/// paths under every draw are reported only in the separate always_dead
/// bucket, so the buckets partition the cells.
struct OutageHistogram {
    std::vector<std::int64_t> counts; ///< size K+1, index = outage count
    std::int64_t always_dead = 0;
};

OutageHistogram outage_histogram(const CellMetricsGrid& grid_result);

/// Per-kind pooled summary: per transmitter, the mean variance over cells
/// with a present std; then sigma_avg = sqrt(mean over tx of those per-tx
/// mean variances) and sigma_min/max = sqrt of the extreme transmitters'
/// values. Metrics with no contributing transmitter are undefined.
struct SummaryRow {
    perturb::PerturbKind kind = perturb::PerturbKind::all;
    std::array<bool, 4> defined{false, false, false, false};
    std::array<double, 4> sigma_avg{};
    std::array<double, 4> sigma_min{};
    std::array<double, 4> sigma_max{};
};

/// Pool per-transmitter mean variances (one optional per metric per tx)
/// into a summary row.
SummaryRow pool_summary(perturb::PerturbKind kind,
                        const std::vector<std::array<std::optional<double>, 4>>& per_tx_variance);

/// Per-transmitter mean of std^2 over cells where the std is present.
std::array<std::optional<double>, 4> per_tx_mean_variance(const CellMetricsGrid& grid_result);

struct TxSite {
    std::uint64_t id = 0;
    Vec3 position;
};

/// Results for one (transmitter, kind) study.
struct TxKindResult {
    std::uint64_t tx_id = 0;
    perturb::PerturbKind kind = perturb::PerturbKind::all;
    CellMetricsGrid grid;
    OutageHistogram histogram;
    std::vector<ProfileBin> profile;
    /// Raw draws [k][cell]; retained only when keep_raw_samples is set.
    std::vector<std::vector<CellSample>> raw;
};

struct SweepResult {
    std::string scene_label;
    std::vector<TxSite> tx_sites;
    std::vector<perturb::PerturbationSpec> specs;
    std::vector<TxKindResult> results;        ///< tx-major, spec-minor
    std::vector<DispersionPair> dispersion;   ///< per kind, pooled over tx
    std::vector<OutageHistogram> pooled_hist; ///< per kind, summed over tx
    std::vector<SummaryRow> summary;          ///< per kind
};

struct SweepOptions {
    int min_samples = 2;
    double profile_bin_m = 25.0;
    int workers = 1;
    bool keep_raw_samples = false;
    double pg_threshold_db = -130.0;
    std::string scene_label = "scene";
};

/// Reduce raw per-draw samples into the full analysis products, exactly
/// as run_sweep does after its sampling phase (fixed-order, worker-count
/// independent). `raw` is tx-major, spec-minor: raw[t * n_specs + s][k][cell].
/// Used to rebuild products from stored raw samples without re-tracing.
SweepResult assemble_sweep(const std::vector<TxSite>& tx_list,
                           const std::vector<perturb::PerturbationSpec>& specs,
                           const RxGrid& grid,
                           std::vector<std::vector<std::vector<CellSample>>> raw,
                           const SweepOptions& options = {});

/// Run the full Monte Carlo study: for every transmitter, perturbation
/// spec, and draw index k in 0..count-1, perturb the scene, trace every
/// grid cell, and reduce into censored per-cell statistics plus the
/// derived products (profiles, histograms, dispersion, summary).
///
/// The result is bit-identical for any worker count at a fixed seed:
/// every (draw, cell) sample is written to a preallocated slot and all
/// reductions run in a fixed order after the parallel phase. Perturbation
/// kinds that leave geometry untouched reuse one trace per cell and only
/// re-evaluate path amplitudes against each draw's materials.
///
/// Any cell trace failure aborts the sweep with (tx, kind, k, cell)
/// context attached to the propagated error.
SweepResult run_sweep(const scene::Scene& scene,
                      const std::vector<TxSite>& tx_list,
                      const std::vector<perturb::PerturbationSpec>& specs,
                      const RxGrid& grid,
                      const rt::TraceConfig& trace_cfg,
                      const SweepOptions& options = {});

/// Write the analysis products into a directory (created if needed):
/// cells_<tx>_<kind>.csv, profile_<kind>.csv, dispersion.csv,
/// outage_hist_<kind>.csv, summary.csv, and one grayscale PGM heatmap per
/// std field per (tx, kind) with a sidecar recording the linear mapping
/// range (pixel 0 = absent, 1..255 spans [min, max]).
void write_outputs(const SweepResult& result, const std::filesystem::path& dir);

} // namespace gert::sweep

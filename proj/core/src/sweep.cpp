// SPDX-License-Identifier: Apache-2.0
#include "gert/sweep/sweep.hpp"

#include "gert/error.hpp"
#include "gert/rt/bvh.hpp"
#include "gert/rt/tracer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace gert::sweep {

const std::array<const char*, 5> kMetricNames = {
    "pg_std_db", "med_std_ns", "ds_std_ns", "k_std_db", "outage_freq"};

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
}

/// Two-pass sample standard deviation (denominator n-1) in index order,
/// so results are independent of any parallel schedule.
double sample_std(const std::vector<double>& xs) {
    const size_t n = xs.size();
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

CellSample to_sample(const metrics::LinkMetrics& m, bool has_paths) {
    CellSample s;
    s.has_paths = has_paths;
    s.connected = m.state == metrics::LinkState::connected;
    if (s.connected) {
        s.pg_db = *m.path_gain_db;
        s.med_ns = *m.mean_excess_delay_ns;
        s.ds_ns = *m.delay_spread_ns;
        if (!m.k_factor_infinite && m.k_factor_db) {
            s.k_finite = true;
            s.k_db = *m.k_factor_db;
        }
    }
    return s;
}

/// Run `count` tasks over `workers` threads via a shared cursor. Each task
/// writes only to its own slots, so scheduling cannot affect the result.
/// The first failure wins; remaining tasks are drained without running.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& task) {
    if (count == 0) return;
    const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= count) break;
            try {
                task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

[[noreturn]] void rethrow_with_context(const std::exception& e, std::uint64_t tx_id,
                                       perturb::PerturbKind kind, std::uint64_t k,
                                       std::size_t cell) {
    std::ostringstream ss;
    ss << "sweep failed at tx=" << tx_id << " kind=" << perturb::to_string(kind)
       << " draw=" << k << " cell=" << cell << ": " << e.what();
    throw Error(ss.str());
}

} // namespace

RxGrid make_rx_grid(const geo::TerrainGrid& terrain, double spacing_m,
                    double clearance_m) {
    if (spacing_m <= 0.0) throw Error("receiver grid spacing must be positive");
    if (clearance_m < 0.0) throw Error("receiver clearance must be non-negative");
    // The terrain mesh spans the cell-center lattice of the raster; keep
    // every receiver strictly inside it so the ground under each cell is
    // real geometry.
    const double xlo = terrain.x0 + 0.5 * terrain.cell_size_m;
    const double xhi = terrain.x0 + (terrain.ncols - 0.5) * terrain.cell_size_m;
    const double ylo = terrain.y0 + 0.5 * terrain.cell_size_m;
    const double yhi = terrain.y0 + (terrain.nrows - 0.5) * terrain.cell_size_m;

    RxGrid grid;
    grid.spacing_m = spacing_m;
    grid.clearance_m = clearance_m;
    grid.nx = static_cast<int>(std::floor((xhi - xlo) / spacing_m + 0.5));
    grid.ny = static_cast<int>(std::floor((yhi - ylo) / spacing_m + 0.5));
    if (grid.nx < 1 || grid.ny < 1)
        throw Error("receiver grid spacing exceeds the terrain extent");
    grid.cells.reserve(static_cast<size_t>(grid.nx) * grid.ny);
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double y = ylo + spacing_m * (iy + 0.5);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = xlo + spacing_m * (ix + 0.5);
            grid.cells.push_back({x, y, terrain.sample(x, y) + clearance_m});
        }
    }
    return grid;
}

CellAggregate aggregate_cells(const std::vector<CellSample>& samples,
                              int min_samples) {
    if (samples.empty()) throw Error("aggregate_cells needs at least one draw");
    CellAggregate a;
    std::vector<double> pg, med, ds, kf;
    bool any_paths = false;
    for (const CellSample& s : samples) {
        if (s.has_paths) any_paths = true;
        if (!s.connected) {
            ++a.outage_count;
            continue;
        }
        ++a.alive_count;
        pg.push_back(s.pg_db);
        med.push_back(s.med_ns);
        ds.push_back(s.ds_ns);
        if (s.k_finite) {
            ++a.finite_k_count;
            kf.push_back(s.k_db);
        }
    }
    a.always_dead = !any_paths;
    a.outage_frequency =
        static_cast<double>(a.outage_count) / static_cast<double>(samples.size());
    const auto min_n = static_cast<size_t>(std::max(2, min_samples));
    if (pg.size() >= min_n) {
        a.pg_std_db = sample_std(pg);
        a.med_std_ns = sample_std(med);
        a.ds_std_ns = sample_std(ds);
    }
    if (kf.size() >= min_n) a.k_std_db = sample_std(kf);
    return a;
}

std::vector<ProfileBin> distance_profile(const CellMetricsGrid& grid_result,
                                         double bin_width_m) {
    if (bin_width_m <= 0.0) throw Error("distance bin width must be positive");
    double d_max = 0.0;
    for (double d : grid_result.distance_m) d_max = std::max(d_max, d);
    const auto n_bins = static_cast<size_t>(std::floor(d_max / bin_width_m)) + 1;

    std::vector<ProfileBin> bins(grid_result.distance_m.empty() ? 0 : n_bins);
    for (size_t b = 0; b < bins.size(); ++b) {
        bins[b].d_lo_m = bin_width_m * static_cast<double>(b);
        bins[b].d_hi_m = bin_width_m * static_cast<double>(b + 1);
    }
    std::array<std::vector<double>, 4> sums;
    for (auto& s : sums) s.assign(bins.size(), 0.0);

    for (size_t c = 0; c < grid_result.cells.size(); ++c) {
        const auto b = static_cast<size_t>(
            std::min<double>(std::floor(grid_result.distance_m[c] / bin_width_m),
                             static_cast<double>(bins.size() - 1)));
        const CellAggregate& cell = grid_result.cells[c];
        const std::array<const std::optional<double>*, 4> fields = {
            &cell.pg_std_db, &cell.med_std_ns, &cell.ds_std_ns, &cell.k_std_db};
        for (int m = 0; m < 4; ++m) {
            if (!fields[static_cast<size_t>(m)]->has_value()) continue;
            sums[static_cast<size_t>(m)][b] += **fields[static_cast<size_t>(m)];
            ++bins[b].count[static_cast<size_t>(m)];
        }
    }
    for (size_t b = 0; b < bins.size(); ++b)
        for (int m = 0; m < 4; ++m)
            if (bins[b].count[static_cast<size_t>(m)] > 0)
                bins[b].mean[static_cast<size_t>(m)] =
                    sums[static_cast<size_t>(m)][b] / bins[b].count[static_cast<size_t>(m)];
    return bins;
}

std::vector<DispersionPair> dispersion_pairs(const std::vector<MetricPoint>& points) {
    std::vector<DispersionPair> out;
    for (int i = 0; i < 5; ++i) {
        for (int j = i + 1; j < 5; ++j) {
            DispersionPair pair;
            pair.metric_x = i;
            pair.metric_y = j;
            double sx = 0, sy = 0;
            std::vector<std::pair<double, double>> pts;
            for (const MetricPoint& p : points) {
                const auto& px = p[static_cast<size_t>(i)];
                const auto& py = p[static_cast<size_t>(j)];
                if (px && py) {
                    pts.emplace_back(*px, *py);
                    sx += *px;
                    sy += *py;
                }
            }
            pair.n = pts.size();
            if (pts.size() >= 3) {
                pair.defined = true;
                const double n = static_cast<double>(pts.size());
                pair.mean_x = sx / n;
                pair.mean_y = sy / n;
                double cxx = 0, cyy = 0, cxy = 0;
                for (const auto& [x, y] : pts) {
                    cxx += (x - pair.mean_x) * (x - pair.mean_x);
                    cyy += (y - pair.mean_y) * (y - pair.mean_y);
                    cxy += (x - pair.mean_x) * (y - pair.mean_y);
                }
                cxx /= n - 1.0;
                cyy /= n - 1.0;
                cxy /= n - 1.0;
                const double denom = std::sqrt(cxx * cyy);
                pair.pearson_r = denom > 0.0 ? cxy / denom
                                             : std::numeric_limits<double>::quiet_NaN();
                // Closed-form eigendecomposition of the 2x2 covariance.
                const double half_tr = 0.5 * (cxx + cyy);
                const double disc =
                    std::sqrt(0.25 * (cxx - cyy) * (cxx - cyy) + cxy * cxy);
                const double l_max = std::max(0.0, half_tr + disc);
                const double l_min = std::max(0.0, half_tr - disc);
                pair.semi_major = 2.0 * std::sqrt(l_max);
                pair.semi_minor = 2.0 * std::sqrt(l_min);
                pair.angle_rad = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
            }
            out.push_back(pair);
        }
    }
    return out;
}

OutageHistogram outage_histogram(const CellMetricsGrid& grid_result) {
    OutageHistogram h;
    std::int64_t k_draws = 0;
    for (const CellAggregate& c : grid_result.cells)
        k_draws = std::max<std::int64_t>(k_draws, c.outage_count + c.alive_count);
    h.counts.assign(static_cast<size_t>(k_draws) + 1, 0);
    for (const CellAggregate& c : grid_result.cells) {
        if (c.always_dead)
            ++h.always_dead;
        else
            ++h.counts[static_cast<size_t>(c.outage_count)];
    }
    return h;
}

std::array<std::optional<double>, 4> per_tx_mean_variance(const CellMetricsGrid& grid_result) {
    std::array<double, 4> sum{};
    std::array<int, 4> n{};
    for (const CellAggregate& c : grid_result.cells) {
        const std::array<const std::optional<double>*, 4> fields = {
            &c.pg_std_db, &c.med_std_ns, &c.ds_std_ns, &c.k_std_db};
        for (int m = 0; m < 4; ++m) {
            const auto& f = *fields[static_cast<size_t>(m)];
            if (f) {
                sum[static_cast<size_t>(m)] += (*f) * (*f);
                ++n[static_cast<size_t>(m)];
            }
        }
    }
    std::array<std::optional<double>, 4> out;
    for (int m = 0; m < 4; ++m)
        if (n[static_cast<size_t>(m)] > 0)
            out[static_cast<size_t>(m)] =
                sum[static_cast<size_t>(m)] / n[static_cast<size_t>(m)];
    return out;
}

SummaryRow pool_summary(perturb::PerturbKind kind,
                        const std::vector<std::array<std::optional<double>, 4>>& per_tx_variance) {
    SummaryRow row;
    row.kind = kind;
    for (int m = 0; m < 4; ++m) {
        double sum = 0.0, lo = 0.0, hi = 0.0;
        int n = 0;
        for (const auto& tx : per_tx_variance) {
            const auto& v = tx[static_cast<size_t>(m)];
            if (!v) continue;
            sum += *v;
            lo = (n == 0) ? *v : std::min(lo, *v);
            hi = (n == 0) ? *v : std::max(hi, *v);
            ++n;
        }
        if (n > 0) {
            row.defined[static_cast<size_t>(m)] = true;
            row.sigma_avg[static_cast<size_t>(m)] = std::sqrt(sum / n);
            row.sigma_min[static_cast<size_t>(m)] = std::sqrt(lo);
            row.sigma_max[static_cast<size_t>(m)] = std::sqrt(hi);
        }
    }
    return row;
}

namespace {

/// Trace one receiver against a prepared scene and reduce to a sample.
CellSample trace_cell(const scene::Scene& sc, const rt::AccelStructure& accel,
                      const rt::TxImageTree& tree, const Vec3& rx,
                      const rt::TraceConfig& cfg, double threshold_db) {
    const rt::PathSet ps = rt::find_paths(sc, accel, tree, rx, cfg);
    return to_sample(metrics::compute_metrics(ps, threshold_db), !ps.paths.empty());
}

} // namespace

namespace {

void validate_study_shape(const std::vector<TxSite>& tx_list,
                          const std::vector<perturb::PerturbationSpec>& specs,
                          const RxGrid& grid) {
    if (tx_list.empty()) throw Error("sweep needs at least one transmitter");
    if (grid.cells.empty()) throw Error("sweep receiver grid is empty");
    for (size_t i = 0; i < tx_list.size(); ++i)
        for (size_t j = i + 1; j < tx_list.size(); ++j)
            if (tx_list[i].id == tx_list[j].id)
                throw Error("duplicate transmitter id in sweep: " +
                            std::to_string(tx_list[i].id));
    for (size_t i = 0; i < specs.size(); ++i) {
        specs[i].validate();
        for (size_t j = i + 1; j < specs.size(); ++j)
            if (specs[i].kind == specs[j].kind)
                throw Error("duplicate perturbation kind in sweep specs: " +
                            std::string(perturb::to_string(specs[i].kind)));
    }
}

} // namespace

SweepResult assemble_sweep(const std::vector<TxSite>& tx_list,
                           const std::vector<perturb::PerturbationSpec>& specs,
                           const RxGrid& grid,
                           std::vector<std::vector<std::vector<CellSample>>> raw,
                           const SweepOptions& options) {
    validate_study_shape(tx_list, specs, grid);
    const size_t n_cells = grid.cells.size();
    if (raw.size() != tx_list.size() * specs.size())
        throw Error("raw sample set does not match the tx/kind matrix");
    for (size_t pair = 0; pair < raw.size(); ++pair) {
        const auto& spec = specs[pair % specs.size()];
        if (raw[pair].size() != static_cast<size_t>(spec.count))
            throw Error("raw sample set has a wrong draw count for kind " +
                        std::string(perturb::to_string(spec.kind)));
        for (const auto& draw : raw[pair])
            if (draw.size() != n_cells)
                throw Error("raw sample draw does not cover the receiver grid");
    }

    SweepResult result;
    result.scene_label = options.scene_label;
    result.tx_sites = tx_list;
    result.specs = specs;

    size_t pair = 0;
    for (const TxSite& tx : tx_list) {
        for (const perturb::PerturbationSpec& spec : specs) {
            std::vector<std::vector<CellSample>>& samples = raw[pair++];
            const auto k_draws = static_cast<size_t>(spec.count);

            // Fixed-order reduction: draw index ascending per cell.
            TxKindResult tk;
            tk.tx_id = tx.id;
            tk.kind = spec.kind;
            tk.grid.grid = grid;
            tk.grid.cells.reserve(n_cells);
            tk.grid.distance_m.reserve(n_cells);
            std::vector<CellSample> column(k_draws);
            for (size_t c = 0; c < n_cells; ++c) {
                for (size_t k = 0; k < k_draws; ++k) column[k] = samples[k][c];
                tk.grid.cells.push_back(aggregate_cells(column, options.min_samples));
                tk.grid.distance_m.push_back(
                    std::hypot(grid.cells[c].x - tx.position.x,
                               grid.cells[c].y - tx.position.y));
            }
            tk.histogram = outage_histogram(tk.grid);
            tk.profile = distance_profile(tk.grid, options.profile_bin_m);
            if (options.keep_raw_samples) tk.raw = std::move(samples);
            result.results.push_back(std::move(tk));
        }
    }

    // Pooled products per kind, in spec order.
    for (const perturb::PerturbationSpec& spec : specs) {
        std::vector<MetricPoint> points;
        OutageHistogram pooled;
        pooled.counts.assign(static_cast<size_t>(spec.count) + 1, 0);
        std::vector<std::array<std::optional<double>, 4>> per_tx;
        for (const TxKindResult& tk : result.results) {
            if (tk.kind != spec.kind) continue;
            for (const CellAggregate& c : tk.grid.cells) {
                points.push_back({c.pg_std_db, c.med_std_ns, c.ds_std_ns, c.k_std_db,
                                  std::optional<double>(c.outage_frequency)});
            }
            for (size_t b = 0; b < tk.histogram.counts.size(); ++b)
                pooled.counts[b] += tk.histogram.counts[b];
            pooled.always_dead += tk.histogram.always_dead;
            per_tx.push_back(per_tx_mean_variance(tk.grid));
        }
        auto pairs = dispersion_pairs(points);
        for (DispersionPair& p : pairs) p.kind = spec.kind;
        result.dispersion.insert(result.dispersion.end(), pairs.begin(), pairs.end());
        result.pooled_hist.push_back(std::move(pooled));
        result.summary.push_back(pool_summary(spec.kind, per_tx));
    }
    return result;
}

SweepResult run_sweep(const scene::Scene& scene,
                      const std::vector<TxSite>& tx_list,
                      const std::vector<perturb::PerturbationSpec>& specs,
                      const RxGrid& grid,
                      const rt::TraceConfig& trace_cfg,
                      const SweepOptions& options) {
    validate_study_shape(tx_list, specs, grid);
    // Transmitters must stand above the local terrain (approximated by the
    // nearest receiver cell's ground elevation).
    for (const TxSite& tx : tx_list) {
        double best = 1e300;
        double ground = 0.0;
        for (const Vec3& c : grid.cells) {
            const double d = (c.x - tx.position.x) * (c.x - tx.position.x) +
                             (c.y - tx.position.y) * (c.y - tx.position.y);
            if (d < best) {
                best = d;
                ground = c.z - grid.clearance_m;
            }
        }
        if (tx.position.z <= ground)
            throw Error("transmitter " + std::to_string(tx.id) +
                        " is at or below the local terrain elevation");
    }

    const size_t n_cells = grid.cells.size();
    const rt::AccelStructure base_accel = rt::build_accel(scene);
    std::vector<std::vector<std::vector<CellSample>>> raw;
    raw.reserve(tx_list.size() * specs.size());

    for (const TxSite& tx : tx_list) {
        // Shared by all geometry-free draws for this transmitter.
        std::optional<rt::TxImageTree> base_tree;

        for (const perturb::PerturbationSpec& spec : specs) {
            const auto k_draws = static_cast<size_t>(spec.count);
            std::vector<std::vector<CellSample>> samples(
                k_draws, std::vector<CellSample>(n_cells));

            const bool geometry_static = spec.kind == perturb::PerturbKind::material;
            if (geometry_static) {
                // Geometry never changes: trace each cell once against the
                // base scene, then re-evaluate path amplitudes per draw.
                if (!base_tree)
                    base_tree = rt::expand_images(base_accel, tx.position, trace_cfg);
                std::vector<rt::PathSet> cell_paths(n_cells);
                parallel_for(n_cells, options.workers, [&](std::size_t c) {
                    try {
                        cell_paths[c] = rt::find_paths(scene, base_accel, *base_tree,
                                                       grid.cells[c], trace_cfg);
                    } catch (const std::exception& e) {
                        rethrow_with_context(e, tx.id, spec.kind, 0, c);
                    }
                });
                parallel_for(k_draws, options.workers, [&](std::size_t k) {
                    std::size_t cell = 0;
                    try {
                        const scene::Scene perturbed =
                            perturb::apply_perturbation(scene, spec, k, tx.id);
                        for (cell = 0; cell < n_cells; ++cell) {
                            rt::PathSet ps = cell_paths[cell];
                            for (rt::Path& p : ps.paths)
                                rt::evaluate_path(p, perturbed, trace_cfg);
                            samples[k][cell] = to_sample(
                                metrics::compute_metrics(ps, options.pg_threshold_db),
                                !ps.paths.empty());
                        }
                    } catch (const std::exception& e) {
                        rethrow_with_context(e, tx.id, spec.kind, k, cell);
                    }
                });
            } else {
                parallel_for(k_draws, options.workers, [&](std::size_t k) {
                    std::size_t cell = 0;
                    try {
                        const scene::Scene perturbed =
                            perturb::apply_perturbation(scene, spec, k, tx.id);
                        const rt::AccelStructure accel = rt::build_accel(perturbed);
                        const rt::TxImageTree tree =
                            rt::expand_images(accel, tx.position, trace_cfg);
                        for (cell = 0; cell < n_cells; ++cell)
                            samples[k][cell] =
                                trace_cell(perturbed, accel, tree, grid.cells[cell],
                                           trace_cfg, options.pg_threshold_db);
                    } catch (const std::exception& e) {
                        rethrow_with_context(e, tx.id, spec.kind, k, cell);
                    }
                });
            }
            raw.push_back(std::move(samples));
        }
    }

    return assemble_sweep(tx_list, specs, grid, std::move(raw), options);
}

namespace {

void write_cells_csv(const TxKindResult& tk, const std::filesystem::path& dir) {
    std::ostringstream name;
    name << "cells_" << tk.tx_id << "_" << perturb::to_string(tk.kind) << ".csv";
    std::ofstream out(dir / name.str());
    out << "x,y,distance_m,pg_std_db,med_std_ns,ds_std_ns,k_std_db,outage_freq,"
           "alive_count\n";
    for (size_t c = 0; c < tk.grid.cells.size(); ++c) {
        const CellAggregate& a = tk.grid.cells[c];
        const Vec3& p = tk.grid.grid.cells[c];
        out << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(tk.grid.distance_m[c]) << ','
            << fmt_opt(a.pg_std_db) << ',' << fmt_opt(a.med_std_ns) << ','
            << fmt_opt(a.ds_std_ns) << ',' << fmt_opt(a.k_std_db) << ','
            << fmt(a.outage_frequency) << ',' << a.alive_count << '\n';
    }
}

void write_heatmaps(const TxKindResult& tk, const std::filesystem::path& dir) {
    const std::array<const char*, 4> fields = {"pg_std_db", "med_std_ns",
                                               "ds_std_ns", "k_std_db"};
    const int nx = tk.grid.grid.nx;
    const int ny = tk.grid.grid.ny;
    for (int m = 0; m < 4; ++m) {
        std::vector<std::optional<double>> values(tk.grid.cells.size());
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (size_t c = 0; c < tk.grid.cells.size(); ++c) {
            const CellAggregate& a = tk.grid.cells[c];
            const std::array<const std::optional<double>*, 4> f = {
                &a.pg_std_db, &a.med_std_ns, &a.ds_std_ns, &a.k_std_db};
            values[c] = *f[static_cast<size_t>(m)];
            if (values[c]) {
                lo = any ? std::min(lo, *values[c]) : *values[c];
                hi = any ? std::max(hi, *values[c]) : *values[c];
                any = true;
            }
        }
        std::ostringstream base;
        base << "heatmap_" << tk.tx_id << "_" << perturb::to_string(tk.kind) << "_"
             << fields[static_cast<size_t>(m)];
        std::ofstream pgm(dir / (base.str() + ".pgm"));
        pgm << "P2\n" << nx << ' ' << ny << "\n255\n";
        // North-up raster: highest-y row first.
        for (int iy = ny - 1; iy >= 0; --iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const auto& v = values[static_cast<size_t>(iy) * nx + ix];
                int pixel = 0;
                if (v) {
                    const double t = hi > lo ? (*v - lo) / (hi - lo) : 1.0;
                    pixel = 1 + static_cast<int>(std::lround(254.0 * t));
                }
                pgm << pixel << (ix + 1 == nx ? '\n' : ' ');
            }
        }
        std::ofstream sidecar(dir / (base.str() + ".pgm.txt"));
        sidecar << "field " << fields[static_cast<size_t>(m)] << "\n"
                << "min " << (any ? fmt(lo) : "nan") << "\n"
                << "max " << (any ? fmt(hi) : "nan") << "\n"
                << "mapping pixel 0 = absent; pixels 1..255 span [min, max] linearly\n"
                << "rows north-up (first row = largest y)\n";
    }
}

} // namespace

void write_outputs(const SweepResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    for (const TxKindResult& tk : result.results) {
        write_cells_csv(tk, dir);
        write_heatmaps(tk, dir);
    }

    // Distance profiles: one file per kind, rows per (tx, bin).
    for (const perturb::PerturbationSpec& spec : result.specs) {
        std::ostringstream name;
        name << "profile_" << perturb::to_string(spec.kind) << ".csv";
        std::ofstream out(dir / name.str());
        out << "tx,bin_lo_m,bin_hi_m";
        for (int m = 0; m < 4; ++m)
            out << ',' << kMetricNames[static_cast<size_t>(m)] << "_mean,"
                << kMetricNames[static_cast<size_t>(m)] << "_cells,"
                << kMetricNames[static_cast<size_t>(m)] << "_low_confidence";
        out << '\n';
        for (const TxKindResult& tk : result.results) {
            if (tk.kind != spec.kind) continue;
            for (const ProfileBin& b : tk.profile) {
                out << tk.tx_id << ',' << fmt(b.d_lo_m) << ',' << fmt(b.d_hi_m);
                for (int m = 0; m < 4; ++m)
                    out << ',' << fmt_opt(b.mean[static_cast<size_t>(m)]) << ','
                        << b.count[static_cast<size_t>(m)] << ','
                        << (b.low_confidence(m) ? 1 : 0);
                out << '\n';
            }
        }
    }

    // Outage histograms: numbered buckets plus the always-dead bucket,
    // per tx and pooled.
    for (size_t si = 0; si < result.specs.size(); ++si) {
        const perturb::PerturbationSpec& spec = result.specs[si];
        std::ostringstream name;
        name << "outage_hist_" << perturb::to_string(spec.kind) << ".csv";
        std::ofstream out(dir / name.str());
        out << "tx,bucket,cells\n";
        for (const TxKindResult& tk : result.results) {
            if (tk.kind != spec.kind) continue;
            for (size_t b = 0; b < tk.histogram.counts.size(); ++b)
                out << tk.tx_id << ',' << b << ',' << tk.histogram.counts[b] << '\n';
            out << tk.tx_id << ",always_dead," << tk.histogram.always_dead << '\n';
        }
        const OutageHistogram& pooled = result.pooled_hist[si];
        for (size_t b = 0; b < pooled.counts.size(); ++b)
            out << "pooled," << b << ',' << pooled.counts[b] << '\n';
        out << "pooled,always_dead," << pooled.always_dead << '\n';
    }

    {
        std::ofstream out(dir / "dispersion.csv");
        out << "kind,metric_x,metric_y,n,defined,pearson_r,mean_x,mean_y,"
               "semi_major,semi_minor,angle_rad\n";
        for (const DispersionPair& p : result.dispersion) {
            out << perturb::to_string(p.kind) << ','
                << kMetricNames[static_cast<size_t>(p.metric_x)] << ','
                << kMetricNames[static_cast<size_t>(p.metric_y)] << ',' << p.n << ','
                << (p.defined ? 1 : 0) << ',';
            if (p.defined)
                out << fmt(p.pearson_r) << ',' << fmt(p.mean_x) << ',' << fmt(p.mean_y)
                    << ',' << fmt(p.semi_major) << ',' << fmt(p.semi_minor) << ','
                    << fmt(p.angle_rad);
            else
                out << ",,,,,";
            out << '\n';
        }
    }

    {
        std::ofstream out(dir / "summary.csv");
        out << "scene,kind";
        for (int m = 0; m < 4; ++m) {
            const std::string n = kMetricNames[static_cast<size_t>(m)];
            out << ',' << n << "_avg," << n << "_min," << n << "_max";
        }
        out << '\n';
        for (const SummaryRow& row : result.summary) {
            out << result.scene_label << ',' << perturb::to_string(row.kind);
            for (int m = 0; m < 4; ++m) {
                const auto mi = static_cast<size_t>(m);
                if (row.defined[mi])
                    out << ',' << fmt(row.sigma_avg[mi]) << ',' << fmt(row.sigma_min[mi])
                        << ',' << fmt(row.sigma_max[mi]);
                else
                    out << ",,,";
            }
            out << '\n';
        }
    }
}

} // namespace gert::sweep

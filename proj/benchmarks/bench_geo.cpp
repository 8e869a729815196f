// SPDX-License-Identifier: Apache-2.0
#include "gert/geo/esri_grid.hpp"
#include "gert/geo/geojson.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>

namespace {

gert::geo::TerrainGrid make_grid(int n) {
    gert::geo::TerrainGrid g;
    g.ncols = n;
    g.nrows = n;
    g.cell_size_m = 10.0;
    g.elevation.resize(static_cast<size_t>(n) * n);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> z(0.0, 50.0);
    for (double& v : g.elevation) v = z(rng);
    return g;
}

void BM_TerrainSample(benchmark::State& state) {
    const auto g = make_grid(256);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> xy(0.0, 2560.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(g.sample(xy(rng), xy(rng)));
    }
}
BENCHMARK(BM_TerrainSample);

void BM_ParseDem(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const std::string text = gert::geo::write_esri_ascii(make_grid(n));
    const auto region = gert::geo::GeoRegion::from_corners(47.99, 48.01, 11.99, 12.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gert::geo::parse_dem(text, region));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_ParseDem)->Arg(64)->Arg(256);

} // namespace

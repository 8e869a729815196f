// SPDX-License-Identifier: Apache-2.0
#include "gert/metrics/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace gert;
using namespace gert::metrics;

namespace {

rt::PathSet make_set(const std::vector<std::complex<double>>& amps,
                     const std::vector<double>& delays_ns) {
    rt::PathSet ps;
    for (size_t i = 0; i < amps.size(); ++i) {
        rt::Path p;
        p.amplitude = amps[i];
        p.delay_s = delays_ns[i] * 1e-9;
        ps.paths.push_back(p);
    }
    return ps;
}

rt::PathSet random_set(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_paths(1, 8);
    std::uniform_real_distribution<double> mag(1e-7, 1e-3);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> delay(100.0, 3000.0);
    const int n = n_paths(rng);
    std::vector<std::complex<double>> amps;
    std::vector<double> delays;
    for (int i = 0; i < n; ++i) {
        amps.push_back(std::polar(mag(rng), phase(rng)));
        delays.push_back(delay(rng));
    }
    return make_set(amps, delays);
}

} // namespace

TEST_CASE("two equal paths 100 ns apart: MED 50 ns, DS 50 ns, K 0 dB") {
    const auto ps = make_set({{1e-4, 0.0}, {0.0, 1e-4}}, {400.0, 500.0});
    const LinkMetrics m = compute_metrics(ps);
    REQUIRE(m.state == LinkState::connected);
    CHECK(*m.mean_excess_delay_ns == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(*m.delay_spread_ns == doctest::Approx(50.0).epsilon(1e-12));
    REQUIRE_FALSE(m.k_factor_infinite);
    CHECK(*m.k_factor_db == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(*m.path_gain_db ==
          doctest::Approx(10.0 * std::log10(2e-8)).epsilon(1e-12));
}

TEST_CASE("single path: zero spread, infinite K, connected above threshold") {
    const auto ps = make_set({{2e-5, 1e-5}}, {700.0});
    const LinkMetrics m = compute_metrics(ps);
    REQUIRE(m.state == LinkState::connected);
    CHECK(*m.mean_excess_delay_ns == 0.0);
    CHECK(*m.delay_spread_ns == 0.0);
    CHECK(m.k_factor_infinite);
    CHECK_FALSE(m.k_factor_db.has_value());
}

TEST_CASE("outage states") {
    // No paths at all.
    const LinkMetrics none = compute_metrics(rt::PathSet{});
    CHECK(none.state == LinkState::outage);
    CHECK_FALSE(none.path_gain_db.has_value());
    CHECK_FALSE(none.mean_excess_delay_ns.has_value());
    CHECK_FALSE(none.delay_spread_ns.has_value());
    CHECK_FALSE(none.k_factor_db.has_value());
    CHECK_FALSE(none.k_factor_infinite);

    // Below the power threshold.
    const auto weak = make_set({{1e-9, 0.0}}, {100.0}); // -180 dB
    CHECK(compute_metrics(weak).state == LinkState::outage);
    CHECK(compute_metrics(weak, -200.0).state == LinkState::connected);

    // Zero amplitude counts as outage even though a path exists.
    const auto zero = make_set({{0.0, 0.0}}, {100.0});
    CHECK(compute_metrics(zero).state == LinkState::outage);
}

TEST_CASE("coherent versus incoherent combining") {
    // Two equal-magnitude opposite-phase paths cancel coherently.
    const auto ps = make_set({{1e-4, 0.0}, {-1e-4, 0.0}}, {100.0, 150.0});
    const LinkMetrics inc = compute_metrics(ps, -130.0, CombineMode::incoherent);
    REQUIRE(inc.state == LinkState::connected);
    CHECK(*inc.path_gain_db == doctest::Approx(10.0 * std::log10(2e-8)));
    const LinkMetrics coh = compute_metrics(ps, -130.0, CombineMode::coherent);
    CHECK(coh.state == LinkState::outage); // perfect null

    // In-phase they add 6 dB above a single component.
    const auto sum = make_set({{1e-4, 0.0}, {1e-4, 0.0}}, {100.0, 150.0});
    const LinkMetrics coh2 = compute_metrics(sum, -130.0, CombineMode::coherent);
    CHECK(*coh2.path_gain_db == doctest::Approx(10.0 * std::log10(4e-8)).epsilon(1e-12));
}

TEST_CASE("metric identities over random path sets") {
    std::mt19937_64 rng(20260814);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> gain(0.25, 4.0);
    std::uniform_real_distribution<double> shift(-500.0, 500.0);

    for (int trial = 0; trial < 1000; ++trial) {
        const rt::PathSet ps = random_set(rng);
        const LinkMetrics base = compute_metrics(ps, -1000.0);
        REQUIRE(base.state == LinkState::connected);

        // Unit-magnitude complex rotation changes nothing.
        const auto rot = std::polar(1.0, phase(rng));
        rt::PathSet rotated = ps;
        for (auto& p : rotated.paths) p.amplitude *= rot;
        const LinkMetrics mr = compute_metrics(rotated, -1000.0);
        CHECK(*mr.path_gain_db == doctest::Approx(*base.path_gain_db).epsilon(1e-12));
        CHECK(*mr.mean_excess_delay_ns ==
              doctest::Approx(*base.mean_excess_delay_ns).epsilon(1e-9));
        CHECK(*mr.delay_spread_ns ==
              doctest::Approx(*base.delay_spread_ns).epsilon(1e-9).scale(1.0));
        CHECK(mr.k_factor_infinite == base.k_factor_infinite);
        if (base.k_factor_db)
            CHECK(*mr.k_factor_db == doctest::Approx(*base.k_factor_db).epsilon(1e-9));

        // Real positive scaling shifts PG by 20 log10 g only.
        const double g = gain(rng);
        rt::PathSet scaled = ps;
        for (auto& p : scaled.paths) p.amplitude *= g;
        const LinkMetrics ms = compute_metrics(scaled, -1000.0);
        CHECK(*ms.path_gain_db ==
              doctest::Approx(*base.path_gain_db + 20.0 * std::log10(g)).epsilon(1e-9));
        CHECK(*ms.mean_excess_delay_ns ==
              doctest::Approx(*base.mean_excess_delay_ns).epsilon(1e-9));
        CHECK(*ms.delay_spread_ns ==
              doctest::Approx(*base.delay_spread_ns).epsilon(1e-9).scale(1.0));
        if (base.k_factor_db)
            CHECK(*ms.k_factor_db == doctest::Approx(*base.k_factor_db).epsilon(1e-9));

        // Common delay offset leaves excess-delay statistics alone.
        rt::PathSet delayed = ps;
        const double dt = shift(rng) * 1e-9;
        for (auto& p : delayed.paths) p.delay_s += dt;
        const LinkMetrics md = compute_metrics(delayed, -1000.0);
        CHECK(*md.mean_excess_delay_ns ==
              doctest::Approx(*base.mean_excess_delay_ns).epsilon(1e-9).scale(1.0));
        CHECK(*md.delay_spread_ns ==
              doctest::Approx(*base.delay_spread_ns).epsilon(1e-9).scale(1.0));

        // Variance bound: DS never exceeds the largest excess delay.
        double max_excess = 0.0;
        double tau0 = 1e300;
        for (const auto& p : ps.paths) tau0 = std::min(tau0, p.delay_s);
        for (const auto& p : ps.paths)
            max_excess = std::max(max_excess, (p.delay_s - tau0) * 1e9);
        CHECK(*base.delay_spread_ns <= max_excess + 1e-9);
    }
}

TEST_CASE("K-factor decreases when a non-dominant component grows") {
    std::vector<std::complex<double>> amps{{1e-3, 0.0}, {2e-4, 0.0}, {1e-4, 0.0}};
    const std::vector<double> delays{100.0, 200.0, 300.0};
    double prev_k = 1e300;
    for (double boost = 1.0; boost < 4.5; boost += 0.5) {
        auto a = amps;
        a[1] *= boost; // still below the dominant component
        const LinkMetrics m = compute_metrics(make_set(a, delays), -1000.0);
        REQUIRE(m.k_factor_db.has_value());
        CHECK(*m.k_factor_db < prev_k);
        prev_k = *m.k_factor_db;
    }
}

// SPDX-License-Identifier: Apache-2.0
#include "gert/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace gert::metrics {

LinkMetrics compute_metrics(const rt::PathSet& ps, double pg_threshold_db,
                            CombineMode combine) {
    LinkMetrics out;
    if (ps.paths.empty()) return out;

    double power_sum = 0.0;
    double power_max = 0.0;
    std::complex<double> field_sum = 0.0;
    double tau_min = std::numeric_limits<double>::infinity();
    for (const auto& p : ps.paths) {
        const double pw = std::norm(p.amplitude);
        power_sum += pw;
        power_max = std::max(power_max, pw);
        field_sum += p.amplitude;
        tau_min = std::min(tau_min, p.delay_s);
    }
    const double pg_linear =
        combine == CombineMode::coherent ? std::norm(field_sum) : power_sum;
    if (pg_linear <= 0.0 || power_sum <= 0.0) return out;

    const double pg_db = 10.0 * std::log10(pg_linear);
    if (pg_db < pg_threshold_db) return out;

    out.state = LinkState::connected;
    out.path_gain_db = pg_db;

    double med = 0.0;
    for (const auto& p : ps.paths)
        med += std::norm(p.amplitude) * (p.delay_s - tau_min) * 1e9;
    med /= power_sum;
    out.mean_excess_delay_ns = med;

    double var = 0.0;
    for (const auto& p : ps.paths) {
        const double excess = (p.delay_s - tau_min) * 1e9 - med;
        var += std::norm(p.amplitude) * excess * excess;
    }
    out.delay_spread_ns = std::sqrt(var / power_sum);

    const double rest = power_sum - power_max;
    if (ps.paths.size() == 1 || rest <= 0.0) {
        out.k_factor_infinite = true;
    } else {
        out.k_factor_db = 10.0 * std::log10(power_max / rest);
    }
    return out;
}

} // namespace gert::metrics

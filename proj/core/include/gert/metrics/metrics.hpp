// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gert/rt/path.hpp"

#include <optional>

namespace gert::metrics {

enum class LinkState { connected, outage };

enum class CombineMode { incoherent, coherent };

/// Channel statistics of one tx/rx link. The value fields are present only
/// when the link is connected; k_factor_db is additionally absent (with the
/// infinite flag set) when a single component carries all the power.
struct LinkMetrics {
    LinkState state = LinkState::outage;
    std::optional<double> path_gain_db;
    std::optional<double> mean_excess_delay_ns;
    std::optional<double> delay_spread_ns;
    std::optional<double> k_factor_db;
    bool k_factor_infinite = false;
};

/// Reduce a path set to link statistics. With p_i = |a_i|^2 and excess
/// delays tau'_i = tau_i - min tau:
///   PG  = 10 log10(sum p_i)            (incoherent, default)
///         10 log10(|sum a_i|^2)        (coherent)
///   MED = sum p_i tau'_i / sum p_i
///   DS  = sqrt(sum p_i (tau'_i - MED)^2 / sum p_i)
///   K   = 10 log10(p_max / (sum p_i - p_max)), infinite for a single path
/// The link is in outage when there are no paths or PG falls below
/// pg_threshold_db.
LinkMetrics compute_metrics(const rt::PathSet& ps,
                            double pg_threshold_db = -130.0,
                            CombineMode combine = CombineMode::incoherent);

} // namespace gert::metrics

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

namespace gert::perturb {

/// Perturbation random channel, one per perturbed quantity.
enum class Channel : std::uint64_t {
    height = 1,
    pos_x = 2,
    pos_y = 3,
    eps = 4,
    sigma = 5,
};

/// Deterministic counter-based random stream: the identifying tuple is
/// hashed into the state of an explicit-state generator, so identical
/// tuples give identical streams on every platform, thread, and call
/// order, and distinct tuples give independent streams.
class NormalStream {
public:
    NormalStream(std::uint64_t master_seed, std::uint64_t tx_id,
                 std::uint64_t perturbation_index, std::int64_t building_id,
                 Channel channel);

    /// Next raw 64-bit word.
    std::uint64_t next_u64();

    /// Next uniform draw in (0, 1].
    double next_uniform();

    /// Next standard-normal draw (Box-Muller, pair-cached).
    double next_normal();

private:
    std::uint64_t state_ = 0;
    std::optional<double> spare_;
};

} // namespace gert::perturb

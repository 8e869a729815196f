// SPDX-License-Identifier: Apache-2.0
#include "gert/perturb/rng.hpp"

#include <cmath>

namespace gert::perturb {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output mixer (bijective finalizer).
constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Fold one tuple word into the hash state.
constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t w) {
    return mix(h + kGolden + mix(w + kGolden));
}

} // namespace

NormalStream::NormalStream(std::uint64_t master_seed, std::uint64_t tx_id,
                           std::uint64_t perturbation_index,
                           std::int64_t building_id, Channel channel) {
    std::uint64_t h = mix(master_seed + kGolden);
    h = absorb(h, tx_id);
    h = absorb(h, perturbation_index);
    h = absorb(h, static_cast<std::uint64_t>(building_id));
    h = absorb(h, static_cast<std::uint64_t>(channel));
    state_ = h;
}

std::uint64_t NormalStream::next_u64() {
    state_ += kGolden;
    return mix(state_);
}

double NormalStream::next_uniform() {
    // 53 high bits -> [0, 1), flipped into (0, 1] so log() is safe.
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return 1.0 - u;
}

double NormalStream::next_normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    return r * std::cos(a);
}

} // namespace gert::perturb

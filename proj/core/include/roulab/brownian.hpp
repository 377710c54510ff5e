#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace roulab {

/// Brownian increments on a uniform lattice, Var(dB_i) = delta.
struct BrownianLattice {
    double delta;
    std::uint64_t seed;
    std::vector<double> increments;
};

/// One Philox4x32-10 block: 128 bits of output for (key, counter), with the
/// 64-bit counter in the low two words and the high words zero. Exposed so the
/// generator can be checked against published reference vectors.
std::array<std::uint32_t, 4> philox4x32_10(std::uint64_t key, std::uint64_t counter);

/// One standard normal draw addressed by (seed, index).
///
/// Counter-based: a Philox4x32-10 block keyed by seed at counter = index,
/// mapped through Box-Muller. Any draw is reproducible in isolation,
/// independent of generation order.
double standard_normal_at(std::uint64_t seed, std::uint64_t index);

/// i.i.d. N(0, delta) increments, increment i = sqrt(delta) * normal(seed, i).
///
/// Requires n_points >= 2 and delta > 0.
BrownianLattice generate_brownian(std::size_t n_points, double delta, std::uint64_t seed);

/// Stream derivation for replicated experiments: mixes (base_seed, k) into a
/// decorrelated 64-bit seed via splitmix64. Pure function, so per-replicate
/// seeds are re-derivable from the manifest without persisting them.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t k);

}  // namespace roulab

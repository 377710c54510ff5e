#include "roulab/brownian.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace roulab {

namespace {

// Philox4x32-10 round constants (Salmon et al. 2011).
constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::uint64_t key, std::uint64_t counter) {
    std::uint32_t c0 = static_cast<std::uint32_t>(counter);
    std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
    std::uint32_t c2 = 0, c3 = 0;
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return {c0, c1, c2, c3};
}

double standard_normal_at(std::uint64_t seed, std::uint64_t index) {
    const auto b = philox4x32_10(seed, index);
    const std::uint64_t hi = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    const std::uint64_t lo = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
    // (m + 1/2) * 2^-53 with m in [0, 2^53): uniforms strictly inside (0, 1).
    const double u1 = (static_cast<double>(hi >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = (static_cast<double>(lo >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

BrownianLattice generate_brownian(std::size_t n_points, double delta, std::uint64_t seed) {
    if (n_points < 2) {
        throw std::invalid_argument("generate_brownian: n_points must be >= 2");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("generate_brownian: delta must be positive");
    }
    BrownianLattice lattice{delta, seed, std::vector<double>(n_points - 1)};
    const double sd = std::sqrt(delta);
    for (std::size_t i = 0; i + 1 < n_points; ++i) {
        lattice.increments[i] = sd * standard_normal_at(seed, i);
    }
    return lattice;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t k) {
    std::uint64_t z = base_seed + (k + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace roulab

#pragma once

#include <span>
#include <vector>

#include "roulab/brownian.hpp"
#include "roulab/hurst.hpp"
#include "roulab/kernel.hpp"

namespace roulab {

/// A Rosenblatt sample path on the uniform lattice times[k] = k * delta.
///
/// values[0] = 0 always; the path carries the Hurst pair and the calibration
/// it was generated with.
struct RosenblattPath {
    std::vector<double> times;
    std::vector<double> values;
    HurstParams hurst;
    KernelConstants consts;

    double delta() const { return consts.grid_delta; }
};

/// Fast chaos-form generator, O(N^2) time, O(N) memory.
///
/// Uses the square-of-first-chaos form
///   Z_{t_k} = d_H sum_{m<k} delta [ W_m^2 - E W_m^2 ],
/// where W is the stationary chaos field of NoiseGram (here in physical
/// units, W_m = delta^{H'-1} * unit field, so E W_m^2 = delta^{2H'-2}
/// gamma[0]). W is synthesized causally from the Brownian increments by the
/// Durbin-Levinson innovation recursion: with phi_{m,.} the order-m
/// autoregression of the Gram table and sigma_m its innovation deviation,
///   W_m = sum_{j=1..m} phi_{m,j} W_{m-j} + sigma_m xi_m,
///   xi_m = dB_m / sqrt(delta),
/// which realizes exactly the lower-triangular Cholesky factor of the Gram
/// applied to the normalized increments.
///
/// Throws std::invalid_argument if consts were calibrated at a different
/// resolution than the lattice step.
RosenblattPath rosenblatt_path_fast(const BrownianLattice& lattice, const HurstParams& hurst,
                                    const KernelConstants& consts);

/// Direct double-sum oracle, O(N^3); guarded to N <= 512.
///
/// Z_{t_k} = d_H delta sum_{i,j} A_k(i, j) (xi_i xi_j - 1_{i=j}) with the
/// symmetric pair kernel A_k(i, j) = delta^{2H'-2} sum_{m<k} L[m,i] L[m,j],
/// where L is the dense lower Cholesky factor of the NoiseGram Toeplitz
/// matrix (computed by Eigen's LLT, an algorithm independent of the fast
/// generator's recursion) and xi the normalized increments. The Wick pairing
/// (xi_i xi_j - 1_{i=j}) centers the diagonal at its expectation, so the sum
/// is the second Wiener-Ito integral of the step kernel induced by the
/// lattice.
RosenblattPath rosenblatt_path_bruteforce(const BrownianLattice& lattice, const HurstParams& hurst,
                                          const KernelConstants& consts);

/// Cov(Z_s, Z_t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2, same as fBm.
double covariance_oracle(const HurstParams& hurst, double s, double t);

/// Forward Riemann-Stieltjes sum sum_k g(t_k) (Z_{t_{k+1}} - Z_{t_k}).
///
/// g must be sampled on the path's grid (same length as times; the final
/// entry is unused). For deterministic g this approximates the
/// Wiener-Rosenblatt integral. Throws std::invalid_argument on length
/// mismatch.
double wiener_rosenblatt_integral(std::span<const double> g, const RosenblattPath& path);

}  // namespace roulab

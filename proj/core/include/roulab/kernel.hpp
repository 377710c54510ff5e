#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <utility>
#include <vector>

#include "roulab/hurst.hpp"

namespace roulab {

/// Thrown when constant calibration fails or a persisted calibration file is
/// inconsistent.
class calibration_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Normalization constants for one lattice resolution.
///
/// c_hprime scales the fBm-type kernel K so the lattice variance of B^{H'}_1
/// is exactly 1; d_h scales the chaos double sum so the lattice variance of
/// Z_1 is exactly 1. Both are tied to the grid they were calibrated on and
/// must not be reused at another resolution.
struct KernelConstants {
    double c_hprime;
    double d_h;
    double grid_delta;
    int points_per_unit;
};

/// K(t, s) = c_{H'} s^{1/2-H'} \int_s^t (u-s)^{H'-3/2} u^{H'-1/2} du.
///
/// The endpoint singularity at u = s is integrable (exponent in (-3/4, -1/2));
/// the integral is evaluated with the substitution u = s + v^2 which turns the
/// integrand into 2 v^{2H'-2} (s + v^2)^{H'-1/2}, mild enough for adaptive
/// Gauss-Kronrod at 1e-10 absolute tolerance.
///
/// Requires 0 < s <= t; s == t returns 0 (empty range). Throws
/// std::domain_error otherwise.
double kernel_K(const HurstParams& params, const KernelConstants& consts, double t, double s);

/// dK/du (u, s) = c_{H'} s^{1/2-H'} (u-s)^{H'-3/2} u^{H'-1/2}.
///
/// Requires 0 < s < u strictly; the value diverges as u decreases to s, so
/// callers must keep u off the diagonal. Throws std::domain_error otherwise.
double kernel_dK(const HurstParams& params, const KernelConstants& consts, double u, double s);

/// Calibrates c_{H'} and d_H on the lattice with step 1/points_per_unit.
///
/// Both constants are exact scale solves, no iteration:
///   c_{H'} = (sum_i K_{c=1}(1, y_i)^2 delta)^{-1/2}   with y_i = i*delta,
///   d_H    = (delta^{2H} * 2 sum_{k,l < n} psi(|k-l|))^{-1/2},
/// where psi is the squared chaos-field Gram of NoiseGram. The second solve is
/// the analytic symmetrized double sum for the lattice variance of Z_1
/// (Isserlis: Cov(W_k^2, W_l^2) = 2 Gamma(k-l)^2), collapsed over lags; no
/// sampling is involved and the resulting lattice variances of B^{H'}_1 and
/// Z_1 equal 1 to machine precision by construction. Because psi is a pure
/// cell-index table, d_H is nearly resolution-independent.
///
/// Requires points_per_unit >= 16.
KernelConstants calibrate_constants(const HurstParams& params, int points_per_unit);

/// Persists {H, Hprime, c_Hprime, d_H, points_per_unit} as JSON.
void save_constants(const HurstParams& params, const KernelConstants& consts,
                    const std::filesystem::path& file);

/// Loads and validates a persisted calibration document.
///
/// Throws calibration_error on missing fields, Hprime mismatch, or
/// nonpositive constants.
std::pair<HurstParams, KernelConstants> load_constants(const std::filesystem::path& file);

/// Stationary covariance table of the driving chaos field.
///
/// The lattice Z is assembled from squares of a stationary centered Gaussian
/// field W_m that stands in for the cell average of the fractional noise
/// dB^{H'}/du over cell m. Cell averaging makes that field stationary: the
/// Volterra kernel's explicit time dependence cancels in every covariance, so
/// the whole lattice law of W is one Toeplitz table, gamma[l] = Cov(W_m,
/// W_{m+l}) in cell units.
///
/// The table is pinned through its square. Increment covariances of Z come
/// out as Cov(dZ_k, dZ_l) = 2 d_H^2 delta^{2H} gamma[|k-l|]^2, and the exact
/// self-similar target for that quantity is proportional to the second
/// difference
///   psi(l) = [ (l+1)^{2H} + |l-1|^{2H} - 2 l^{2H} ] / (2H(2H-1)),
/// so gamma[l] = sqrt(psi(l)) reproduces every increment covariance of Z
/// exactly once d_H is calibrated. The sequence is positive definite on the
/// whole H range (its spectral density is bounded below by a positive
/// constant; checked in the tests), which is what the Cholesky-based
/// generators require.
struct NoiseGram {
    std::size_t n;
    std::vector<double> gamma;  ///< gamma[l] = sqrt(psi(l)), l = 0 .. n-1

    NoiseGram(const HurstParams& params, std::size_t n_cells);

    /// Squared Gram entry psi(l) = gamma[l]^2.
    double psi(std::size_t l) const { return gamma[l] * gamma[l]; }
};

}  // namespace roulab

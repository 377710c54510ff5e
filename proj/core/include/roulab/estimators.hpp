#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "roulab/model.hpp"

namespace roulab {

class estimator_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// gamma_n^{-1} <= 0: the path carries no usable fluctuation (Bessel edge).
class degenerate_path_error : public estimator_error {
public:
    using estimator_error::estimator_error;
};

/// The alt-A1 denominator int phi_extra X dt is too close to 0.
class near_zero_denominator_error : public estimator_error {
public:
    using estimator_error::estimator_error;
};

enum class EstimatorKind { lse, alt_a1, alt_a1star };

std::string estimator_name(EstimatorKind kind);
EstimatorKind parse_estimator(const std::string& name);

/// Observed-path statistics feeding every estimator. Lebesgue integrals are
/// trapezoidal, dX integrals are forward sums.
struct LseComponents {
    int horizon_n;
    std::size_t p;
    std::vector<double> a_n;       ///< a_n[i] = int_0^n phi_i X dt
    double b_n;                    ///< int_0^n X^2 dt
    std::vector<double> lambda_n;  ///< Lambda_{n,i} = a_n[i] / n
    double gamma_n_inv;            ///< b_n/n - sum Lambda_{n,i}^2
    Eigen::MatrixXd Q_n;           ///< [n Id, -a_n; -a_n^T, b_n]
    Eigen::VectorXd P_n;           ///< (int phi_i dX, ..., -int X dX)
};

struct EstimateResult {
    EstimatorKind kind;
    std::vector<double> theta_hat;  ///< (mu_hat_1..mu_hat_p, alpha_hat)
    int horizon_n;
    std::map<std::string, double> diagnostics;
    /// LSE only: the last P_n component replaces a Skorohod integral by the
    /// pathwise forward sum, so the LSE here is a surrogate whose bias is
    /// reported, not certified.
    bool pathwise_surrogate = false;
};

/// Forward sum sum_k g(t_k) (X_{k+1} - X_k); g sampled on the grid of X
/// (length times, last entry unused).
double integral_against_path(std::span<const double> g, const SamplePath& path);

/// Trapezoidal int_0^T g(t) X_t dt on the grid of X.
double lebesgue_integral(std::span<const double> g, const SamplePath& path);

/// Assembles a_n, b_n, Lambda_n, gamma_n^{-1}, Q_n, P_n.
///
/// Requires the horizon to be a whole number of periods (times.back()
/// integer) and >= 1. Throws degenerate_path_error when gamma_n^{-1} <= 0.
LseComponents compute_lse_components(const SamplePath& path, const DriftSpec& drift);

/// Closed-form block inverse
///   Q_n^{-1} = (1/n) [ Id + gamma_n Lambda_n Lambda_n^T , gamma_n Lambda_n
///                    ; gamma_n Lambda_n^T              , gamma_n          ],
/// the Schur-complement inverse of [n Id, -a; -a^T, b]. Throws
/// degenerate_path_error when gamma_n^{-1} <= 0.
Eigen::MatrixXd invert_Qn(const LseComponents& comps);

/// LSE theta_hat = Q_n^{-1} P_n through the closed-form inverse. Carries the
/// pathwise-surrogate caveat flag.
EstimateResult lse_estimate(const SamplePath& path, const DriftSpec& drift);

/// Alternative estimator under (A1):
///   alpha_bar = -(int phi_extra dX) / (int phi_extra X dt),
///   mu_bar_i  = (1/n)(int phi_i dX + alpha_bar int phi_i X dt).
/// phi_extra must be orthogonal to the basis (checked by quadrature); the
/// denominator is guarded at |den|/n >= 1e-6.
EstimateResult alt_estimate_a1(const SamplePath& path, const DriftSpec& drift,
                               const TrigBasisFunction& phi_extra);

/// Alternative estimator under (A1*):
///   alpha_bar^(1) = (gamma_n^{-1} / (H Gamma(2H)))^{-1/(2H)},
/// mu_bar as in alt_estimate_a1 with alpha_bar^(1). Requires the basis to
/// classify as A1*.
EstimateResult alt_estimate_a1star(const SamplePath& path, const DriftSpec& drift,
                                   const HurstParams& hurst);

}  // namespace roulab

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "roulab/hurst.hpp"
#include "roulab/rosenblatt.hpp"

namespace roulab {

enum class BasisKind { constant, sine, cosine };

/// One element of the 1-periodic orthonormal family
/// {1, sqrt(2) sin(2 pi k t), sqrt(2) cos(2 pi k t)}.
struct TrigBasisFunction {
    BasisKind kind = BasisKind::constant;
    int frequency = 0;  ///< cycles per unit time; 0 for the constant

    double operator()(double t) const;

    /// integral over [0, 1]: 1 for the constant, 0 otherwise.
    double integral01() const { return kind == BasisKind::constant ? 1.0 : 0.0; }

    /// Config token: "const", "sin:k", "cos:k".
    std::string name() const;

    /// Parses a config token; throws std::invalid_argument on anything else.
    static TrigBasisFunction parse(const std::string& token);

    bool operator==(const TrigBasisFunction&) const = default;
};

/// The periodic drift L(t) = sum_i mu_i phi_i(t).
struct DriftSpec {
    std::vector<TrigBasisFunction> basis;  ///< length p >= 1, pairwise distinct
    std::vector<double> mu;                ///< length p
};

/// Full model parameter set (the estimation target is (mu_1..mu_p, alpha)).
struct ModelParams {
    DriftSpec drift;
    double alpha;
    HurstParams hurst;
};

/// Constants of the limit laws attached to a model configuration.
struct LimitLawSpec {
    double C_alpha;                     ///< alpha^H / (2 H^2 Gamma(2H))
    double B_H;                         ///< (2H-1) Gamma(H+1) / sqrt(H(2H-1)/2)
    std::vector<double> integrals_phi;  ///< integral of phi_i over [0,1]
    double h_tilde_integral;            ///< integral of h_tilde over [0,1]
    std::vector<double> lambda;         ///< Lambda_i = <phi_i, h_tilde>
    double gamma;                       ///< the positive limit 1/gamma^{-1}
};

/// Deterministic limits of the observed-path statistics.
struct ModelLimits {
    std::vector<double> lambda;
    double gamma;
    Eigen::MatrixXd Q;  ///< (p+1)x(p+1) bordered-identity limit of n Q_n^{-1}
    LimitLawSpec law;
};

/// Classification under the symmetry rule: A1* iff for every frequency k the
/// sine and cosine elements are either both present or both absent (the
/// constant is self-paired). Under A1, suggested_phi is the lowest-frequency
/// missing counterpart, which is orthogonal to the basis and non-orthogonal
/// to h_tilde.
struct Classification {
    bool a1_star;
    std::optional<TrigBasisFunction> suggested_phi;
};

/// Sample path of the observed process on the uniform grid.
struct SamplePath {
    double delta;
    std::vector<double> times;
    std::vector<double> values;
};

/// Validates basis/mu shape and pairwise distinctness; throws
/// std::invalid_argument on violation.
void validate_drift(const DriftSpec& spec);

double eval_L(const DriftSpec& spec, double t);

/// Stationary mean h_tilde(t) = e^{-alpha t} int_{-inf}^t e^{alpha s} L(s) ds
/// by the closed-form response of each trigonometric component.
double eval_h_tilde(const ModelParams& params, double t);

Classification classify_assumption(const DriftSpec& spec);

/// Euler scheme X_{k+1} = X_k + (L(t_k) - alpha X_k) delta + dZ_k on the
/// noise grid. Throws std::invalid_argument when alpha * delta >= 1 (the
/// explicit scheme's stability bound).
SamplePath simulate_rou(const ModelParams& params, const RosenblattPath& noise, double x0 = 0.0);

/// Closed-form inner product <phi, h_tilde> over one period, for any element
/// of the orthonormal family (not just basis members).
double h_tilde_inner(const ModelParams& params, const TrigBasisFunction& phi);

/// Closed-form limits: Lambda_i = <phi_i, h_tilde>, gamma^{-1} =
/// ||h_tilde||^2 + alpha^{-2H} H Gamma(2H) - sum Lambda_i^2 (positive by
/// Bessel), and the bordered-identity matrix Q.
ModelLimits compute_limits(const ModelParams& params);

}  // namespace roulab

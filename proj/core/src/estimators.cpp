#include "roulab/estimators.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace roulab {

namespace {

constexpr double kNearZeroDenominator = 1e-6;
constexpr double kOrthogonalityTol = 1e-8;

/// Whole-period horizon of the path; throws when the grid does not end on an
/// integer time or holds fewer than two points.
int path_horizon(const SamplePath& path) {
    if (path.times.size() < 2 || path.times.size() != path.values.size()) {
        throw std::invalid_argument("estimator: path must hold >= 2 aligned samples");
    }
    if (!(path.delta > 0.0)) {
        throw std::invalid_argument("estimator: path delta must be positive");
    }
    const double T = path.times.back();
    const int n = static_cast<int>(std::llround(T));
    if (n < 1 || std::abs(T - n) > 1e-9 * std::max(1.0, T)) {
        throw std::invalid_argument(
            "estimator: horizon must be a whole number of periods (integer end time)");
    }
    return n;
}

std::vector<double> sample_on_grid(const TrigBasisFunction& phi, std::span<const double> times) {
    std::vector<double> g(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        g[k] = phi(times[k]);
    }
    return g;
}

/// Composite Simpson over [0, 1] with 2048 panels; used only to certify the
/// orthogonality of phi_extra against the drift basis.
double simpson01(const TrigBasisFunction& f, const TrigBasisFunction& g) {
    constexpr int n = 2048;
    const double h = 1.0 / n;
    double acc = f(0.0) * g(0.0) + f(1.0) * g(1.0);
    for (int k = 1; k < n; ++k) {
        const double t = k * h;
        acc += (k % 2 == 1 ? 4.0 : 2.0) * f(t) * g(t);
    }
    return acc * h / 3.0;
}

struct AltCore {
    int n;
    double alpha_bar;
    std::vector<double> mu_bar;
};

/// mu_bar_i = (1/n)(int phi_i dX + alpha_bar int phi_i X dt), shared by both
/// alternative estimators once alpha_bar is fixed.
AltCore alt_mu_from_alpha(const SamplePath& path, const DriftSpec& drift, double alpha_bar) {
    AltCore core{path_horizon(path), alpha_bar, {}};
    core.mu_bar.resize(drift.basis.size());
    for (std::size_t i = 0; i < drift.basis.size(); ++i) {
        const std::vector<double> g = sample_on_grid(drift.basis[i], path.times);
        core.mu_bar[i] =
            (integral_against_path(g, path) + alpha_bar * lebesgue_integral(g, path)) / core.n;
    }
    return core;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::lse:
            return "lse";
        case EstimatorKind::alt_a1:
            return "alt_a1";
        case EstimatorKind::alt_a1star:
            return "alt_a1star";
    }
    throw std::logic_error("estimator_name: invalid kind");
}

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "lse") return EstimatorKind::lse;
    if (name == "alt_a1") return EstimatorKind::alt_a1;
    if (name == "alt_a1star") return EstimatorKind::alt_a1star;
    throw std::invalid_argument("unknown estimator '" + name +
                                "' (expected lse, alt_a1, or alt_a1star)");
}

double integral_against_path(std::span<const double> g, const SamplePath& path) {
    if (g.size() != path.values.size()) {
        throw std::invalid_argument("integral_against_path: integrand/grid length mismatch");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
        acc += g[k] * (path.values[k + 1] - path.values[k]);
    }
    return acc;
}

double lebesgue_integral(std::span<const double> g, const SamplePath& path) {
    if (g.size() != path.values.size()) {
        throw std::invalid_argument("lebesgue_integral: integrand/grid length mismatch");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
        acc += 0.5 * (g[k] * path.values[k] + g[k + 1] * path.values[k + 1]);
    }
    return acc * path.delta;
}

LseComponents compute_lse_components(const SamplePath& path, const DriftSpec& drift) {
    validate_drift(drift);
    LseComponents comps;
    comps.horizon_n = path_horizon(path);
    comps.p = drift.basis.size();
    const auto p = static_cast<Eigen::Index>(comps.p);
    const double n = comps.horizon_n;

    comps.a_n.resize(comps.p);
    comps.lambda_n.resize(comps.p);
    comps.P_n.resize(p + 1);
    for (std::size_t i = 0; i < comps.p; ++i) {
        const std::vector<double> g = sample_on_grid(drift.basis[i], path.times);
        comps.a_n[i] = lebesgue_integral(g, path);
        comps.lambda_n[i] = comps.a_n[i] / n;
        comps.P_n(static_cast<Eigen::Index>(i)) = integral_against_path(g, path);
    }
    const std::vector<double> x(path.values.begin(), path.values.end());
    comps.b_n = lebesgue_integral(x, path);  // g = X gives int X^2 dt
    comps.P_n(p) = -integral_against_path(x, path);

    double lambda_sq = 0.0;
    for (double l : comps.lambda_n) lambda_sq += l * l;
    comps.gamma_n_inv = comps.b_n / n - lambda_sq;
    if (!(comps.gamma_n_inv > 0.0)) {
        throw degenerate_path_error("gamma_n^{-1} <= 0: path carries no usable fluctuation");
    }

    comps.Q_n = Eigen::MatrixXd::Zero(p + 1, p + 1);
    comps.Q_n.topLeftCorner(p, p) = n * Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(comps.a_n.data(), p);
    comps.Q_n.topRightCorner(p, 1) = -a;
    comps.Q_n.bottomLeftCorner(1, p) = -a.transpose();
    comps.Q_n(p, p) = comps.b_n;
    return comps;
}

Eigen::MatrixXd invert_Qn(const LseComponents& comps) {
    if (!(comps.gamma_n_inv > 0.0)) {
        throw degenerate_path_error("gamma_n^{-1} <= 0: Q_n is singular");
    }
    const auto p = static_cast<Eigen::Index>(comps.p);
    const double n = comps.horizon_n;
    const double gamma_n = 1.0 / comps.gamma_n_inv;
    Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(comps.lambda_n.data(), p);
    Eigen::MatrixXd inv(p + 1, p + 1);
    inv.topLeftCorner(p, p) =
        Eigen::MatrixXd::Identity(p, p) + gamma_n * lambda * lambda.transpose();
    inv.topRightCorner(p, 1) = gamma_n * lambda;
    inv.bottomLeftCorner(1, p) = gamma_n * lambda.transpose();
    inv(p, p) = gamma_n;
    return inv / n;
}

EstimateResult lse_estimate(const SamplePath& path, const DriftSpec& drift) {
    const LseComponents comps = compute_lse_components(path, drift);
    const Eigen::VectorXd theta = invert_Qn(comps) * comps.P_n;
    EstimateResult result;
    result.kind = EstimatorKind::lse;
    result.theta_hat.assign(theta.data(), theta.data() + theta.size());
    result.horizon_n = comps.horizon_n;
    result.diagnostics["gamma_n_inv"] = comps.gamma_n_inv;
    result.diagnostics["b_n_over_n"] = comps.b_n / comps.horizon_n;
    result.pathwise_surrogate = true;
    return result;
}

EstimateResult alt_estimate_a1(const SamplePath& path, const DriftSpec& drift,
                               const TrigBasisFunction& phi_extra) {
    validate_drift(drift);
    for (const auto& phi : drift.basis) {
        if (std::abs(simpson01(phi_extra, phi)) > kOrthogonalityTol) {
            throw estimator_error("alt_a1: phi_extra '" + phi_extra.name() +
                                  "' is not orthogonal to basis element '" + phi.name() + "'");
        }
    }
    const int n = path_horizon(path);
    const std::vector<double> g = sample_on_grid(phi_extra, path.times);
    const double numerator = integral_against_path(g, path);
    const double denominator = lebesgue_integral(g, path);
    if (std::abs(denominator) / n < kNearZeroDenominator) {
        throw near_zero_denominator_error(
            "alt_a1: |int phi_extra X dt| / n below 1e-6, alpha_bar unstable");
    }
    const AltCore core = alt_mu_from_alpha(path, drift, -numerator / denominator);

    EstimateResult result;
    result.kind = EstimatorKind::alt_a1;
    result.theta_hat = core.mu_bar;
    result.theta_hat.push_back(core.alpha_bar);
    result.horizon_n = n;
    result.diagnostics["den_over_n"] = denominator / n;
    // Recorded for the CSV diagnostics column; the alternative estimator does
    // not itself need Q_n, so a non-positive value is reported, not thrown.
    const std::vector<double> x(path.values.begin(), path.values.end());
    const double b_n = lebesgue_integral(x, path);
    double lambda_sq = 0.0;
    for (const auto& phi : drift.basis) {
        const double lam = lebesgue_integral(sample_on_grid(phi, path.times), path) / n;
        lambda_sq += lam * lam;
    }
    result.diagnostics["gamma_n_inv"] = b_n / n - lambda_sq;
    return result;
}

EstimateResult alt_estimate_a1star(const SamplePath& path, const DriftSpec& drift,
                                   const HurstParams& hurst) {
    if (!classify_assumption(drift).a1_star) {
        throw estimator_error("alt_a1star: basis does not satisfy the A1* symmetry rule");
    }
    const LseComponents comps = compute_lse_components(path, drift);
    const double h = hurst.H;
    const double ratio = comps.gamma_n_inv / (h * std::tgamma(2.0 * h));
    const double alpha_bar = std::pow(ratio, -1.0 / (2.0 * h));
    const AltCore core = alt_mu_from_alpha(path, drift, alpha_bar);

    EstimateResult result;
    result.kind = EstimatorKind::alt_a1star;
    result.theta_hat = core.mu_bar;
    result.theta_hat.push_back(alpha_bar);
    result.horizon_n = comps.horizon_n;
    result.diagnostics["gamma_n_inv"] = comps.gamma_n_inv;
    return result;
}

}  // namespace roulab

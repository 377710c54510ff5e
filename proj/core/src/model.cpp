#include "roulab/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

namespace roulab {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Fourier coefficients of h_tilde over the orthonormal family: the response
/// of e^{-alpha t} int_{-inf}^t e^{alpha s} (.) ds to each drift component.
/// With w = 2 pi k and D = w^2 + alpha^2:
///   mu * sin_k  ->  (mu alpha / D) sin_k - (mu w / D) cos_k
///   mu * cos_k  ->  (mu w / D) sin_k + (mu alpha / D) cos_k
///   mu * const  ->  (mu / alpha) const
struct HTildeCoefficients {
    double c0 = 0.0;                              // constant coordinate
    std::map<int, std::pair<double, double>> cf;  // k -> (sin_k, cos_k) coordinates

    HTildeCoefficients(const DriftSpec& drift, double alpha) {
        for (std::size_t i = 0; i < drift.basis.size(); ++i) {
            const TrigBasisFunction& phi = drift.basis[i];
            const double mu = drift.mu[i];
            if (phi.kind == BasisKind::constant) {
                c0 += mu / alpha;
                continue;
            }
            const double w = kTwoPi * phi.frequency;
            const double d = w * w + alpha * alpha;
            auto& [cs, cc] = cf[phi.frequency];
            if (phi.kind == BasisKind::sine) {
                cs += mu * alpha / d;
                cc -= mu * w / d;
            } else {
                cs += mu * w / d;
                cc += mu * alpha / d;
            }
        }
    }

    double norm_sq() const {
        double acc = c0 * c0;
        for (const auto& [k, c] : cf) {
            acc += c.first * c.first + c.second * c.second;
        }
        return acc;
    }

    double coordinate(const TrigBasisFunction& phi) const {
        if (phi.kind == BasisKind::constant) {
            return c0;
        }
        auto it = cf.find(phi.frequency);
        if (it == cf.end()) {
            return 0.0;
        }
        return phi.kind == BasisKind::sine ? it->second.first : it->second.second;
    }
};

}  // namespace

double TrigBasisFunction::operator()(double t) const {
    switch (kind) {
        case BasisKind::constant:
            return 1.0;
        case BasisKind::sine:
            return kSqrt2 * std::sin(kTwoPi * frequency * t);
        case BasisKind::cosine:
            return kSqrt2 * std::cos(kTwoPi * frequency * t);
    }
    throw std::logic_error("TrigBasisFunction: invalid kind");
}

std::string TrigBasisFunction::name() const {
    switch (kind) {
        case BasisKind::constant:
            return "const";
        case BasisKind::sine:
            return "sin:" + std::to_string(frequency);
        case BasisKind::cosine:
            return "cos:" + std::to_string(frequency);
    }
    throw std::logic_error("TrigBasisFunction: invalid kind");
}

TrigBasisFunction TrigBasisFunction::parse(const std::string& token) {
    if (token == "const" || token == "1") {
        return {BasisKind::constant, 0};
    }
    const auto colon = token.find(':');
    if (colon != std::string::npos) {
        const std::string head = token.substr(0, colon);
        const std::string tail = token.substr(colon + 1);
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(tail, &used);
            if (used != tail.size()) k = 0;
        } catch (const std::exception&) {
            k = 0;
        }
        if (k >= 1) {
            if (head == "sin") return {BasisKind::sine, k};
            if (head == "cos") return {BasisKind::cosine, k};
        }
    }
    throw std::invalid_argument("basis token must be const, sin:k, or cos:k (k >= 1): '" + token +
                                "'");
}

void validate_drift(const DriftSpec& spec) {
    if (spec.basis.empty()) {
        throw std::invalid_argument("drift basis must be nonempty");
    }
    if (spec.basis.size() != spec.mu.size()) {
        throw std::invalid_argument("drift basis and mu must have equal length");
    }
    for (const auto& phi : spec.basis) {
        if (phi.kind != BasisKind::constant && phi.frequency < 1) {
            throw std::invalid_argument("trigonometric basis frequency must be >= 1");
        }
        if (phi.kind == BasisKind::constant && phi.frequency != 0) {
            throw std::invalid_argument("constant basis element must have frequency 0");
        }
    }
    for (std::size_t i = 0; i < spec.basis.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.basis.size(); ++j) {
            if (spec.basis[i] == spec.basis[j]) {
                throw std::invalid_argument("drift basis elements must be pairwise distinct");
            }
        }
    }
}

double eval_L(const DriftSpec& spec, double t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.basis.size(); ++i) {
        acc += spec.mu[i] * spec.basis[i](t);
    }
    return acc;
}

double eval_h_tilde(const ModelParams& params, double t) {
    validate_drift(params.drift);
    if (!(params.alpha > 0.0)) {
        throw std::invalid_argument("eval_h_tilde: alpha must be positive");
    }
    const double alpha = params.alpha;
    double acc = 0.0;
    for (std::size_t i = 0; i < params.drift.basis.size(); ++i) {
        const TrigBasisFunction& phi = params.drift.basis[i];
        const double mu = params.drift.mu[i];
        if (phi.kind == BasisKind::constant) {
            acc += mu / alpha;
            continue;
        }
        const double w = kTwoPi * phi.frequency;
        const double d = w * w + alpha * alpha;
        const double sn = std::sin(w * t);
        const double cs = std::cos(w * t);
        if (phi.kind == BasisKind::sine) {
            acc += mu * kSqrt2 * (alpha * sn - w * cs) / d;
        } else {
            acc += mu * kSqrt2 * (alpha * cs + w * sn) / d;
        }
    }
    return acc;
}

Classification classify_assumption(const DriftSpec& spec) {
    validate_drift(spec);
    std::set<int> sines, cosines;
    for (const auto& phi : spec.basis) {
        if (phi.kind == BasisKind::sine) sines.insert(phi.frequency);
        if (phi.kind == BasisKind::cosine) cosines.insert(phi.frequency);
    }
    if (sines == cosines) {
        return {true, std::nullopt};
    }
    // Lowest-frequency missing counterpart: orthogonal to every basis element
    // and non-orthogonal to the h_tilde component at the same frequency.
    int best_freq = 0;
    BasisKind best_kind = BasisKind::constant;
    for (int k : sines) {
        if (!cosines.contains(k) && (best_freq == 0 || k < best_freq)) {
            best_freq = k;
            best_kind = BasisKind::cosine;
        }
    }
    for (int k : cosines) {
        if (!sines.contains(k) && (best_freq == 0 || k < best_freq)) {
            best_freq = k;
            best_kind = BasisKind::sine;
        }
    }
    return {false, TrigBasisFunction{best_kind, best_freq}};
}

SamplePath simulate_rou(const ModelParams& params, const RosenblattPath& noise, double x0) {
    validate_drift(params.drift);
    if (!(params.alpha > 0.0)) {
        throw std::invalid_argument("simulate_rou: alpha must be positive");
    }
    const double delta = noise.delta();
    if (noise.times.size() < 2 || noise.times.size() != noise.values.size()) {
        throw std::invalid_argument("simulate_rou: noise path malformed");
    }
    if (params.alpha * delta >= 1.0) {
        throw std::invalid_argument(
            "simulate_rou: alpha * delta >= 1 violates the Euler stability bound");
    }
    SamplePath path{delta, noise.times, std::vector<double>(noise.times.size())};
    path.values[0] = x0;
    for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
        const double drift = (eval_L(params.drift, path.times[k]) - params.alpha * path.values[k]);
        const double dz = noise.values[k + 1] - noise.values[k];
        path.values[k + 1] = path.values[k] + drift * delta + dz;
    }
    return path;
}

double h_tilde_inner(const ModelParams& params, const TrigBasisFunction& phi) {
    validate_drift(params.drift);
    return HTildeCoefficients(params.drift, params.alpha).coordinate(phi);
}

ModelLimits compute_limits(const ModelParams& params) {
    validate_drift(params.drift);
    if (!(params.alpha > 0.0)) {
        throw std::invalid_argument("compute_limits: alpha must be positive");
    }
    const double alpha = params.alpha;
    const double h = params.hurst.H;
    const std::size_t p = params.drift.basis.size();
    const HTildeCoefficients coef(params.drift, alpha);

    ModelLimits limits;
    limits.lambda.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        limits.lambda[i] = coef.coordinate(params.drift.basis[i]);
    }
    double lambda_sq = 0.0;
    for (double l : limits.lambda) lambda_sq += l * l;

    const double stationary_var = std::pow(alpha, -2.0 * h) * h * std::tgamma(2.0 * h);
    const double gamma_inv = coef.norm_sq() + stationary_var - lambda_sq;
    if (!(gamma_inv > 0.0)) {
        throw std::logic_error("compute_limits: gamma^{-1} must be positive (Bessel)");
    }
    limits.gamma = 1.0 / gamma_inv;

    Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(limits.lambda.data(), p);
    limits.Q = Eigen::MatrixXd::Zero(p + 1, p + 1);
    limits.Q.topLeftCorner(p, p) =
        Eigen::MatrixXd::Identity(p, p) + limits.gamma * lambda * lambda.transpose();
    limits.Q.topRightCorner(p, 1) = limits.gamma * lambda;
    limits.Q.bottomLeftCorner(1, p) = limits.gamma * lambda.transpose();
    limits.Q(p, p) = limits.gamma;

    limits.law.C_alpha = std::pow(alpha, h) / (2.0 * h * h * std::tgamma(2.0 * h));
    limits.law.B_H =
        (2.0 * h - 1.0) * std::tgamma(h + 1.0) / std::sqrt(0.5 * h * (2.0 * h - 1.0));
    limits.law.integrals_phi.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        limits.law.integrals_phi[i] = params.drift.basis[i].integral01();
    }
    limits.law.h_tilde_integral = coef.c0;
    limits.law.lambda = limits.lambda;
    limits.law.gamma = limits.gamma;
    return limits;
}

}  // namespace roulab

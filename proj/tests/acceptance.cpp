/// Acceptance gate: one check per release criterion, each printing a single
/// [PASS]/[FAIL] line with the measured quantities. Statistical checks use
/// fixed seeds and 3-standard-error bands; closed-form checks use pinned
/// absolute/relative tolerances. Run with no arguments for the full gate, or
/// pass criterion ids (e.g. "C5 C9") to run a subset.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "roulab/estimators.hpp"
#include "roulab/montecarlo.hpp"
#include "roulab/rosenblatt.hpp"
#include "test_util.hpp"

using namespace roulab;
using roulab::testing::TempDir;
using roulab::testing::slurp;
using roulab::testing::spit;

namespace {

DriftSpec make_drift(std::initializer_list<const char*> names, std::initializer_list<double> mu) {
    DriftSpec spec;
    for (const char* n : names) spec.basis.push_back(TrigBasisFunction::parse(n));
    spec.mu.assign(mu);
    return spec;
}

std::string num(double x) {
    std::ostringstream out;
    out << std::setprecision(4) << x;
    return out.str();
}

// ---------------------------------------------------------------------------
// C1: the O(N log N) generator and the O(N^3) double-sum oracle are the same
// function of the noise, pointwise to 1e-10 relative.
bool c1_generator_equivalence(std::string& detail) {
    double worst = 0.0;
    for (double h : {0.6, 0.7, 0.8}) {
        const HurstParams params(h);
        const KernelConstants consts = calibrate_constants(params, 128);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto lattice = generate_brownian(129, consts.grid_delta, seed);
            const auto fast = rosenblatt_path_fast(lattice, params, consts);
            const auto brute = rosenblatt_path_bruteforce(lattice, params, consts);
            double sup = 0.0;
            for (double v : brute.values) sup = std::max(sup, std::abs(v));
            for (std::size_t k = 0; k < fast.values.size(); ++k) {
                const double denom = std::max(std::abs(brute.values[k]), 1e-3 * sup);
                worst = std::max(worst, std::abs(fast.values[k] - brute.values[k]) / denom);
            }
        }
    }
    detail = "max relative deviation " + num(worst) + " over H in {0.6,0.7,0.8} x 10 seeds, N = 128 (tol 1e-10)";
    return worst <= 1e-10;
}

// The marginal law of the lattice process carries a slowly decaying
// discretization bias away from the calibration horizon t = 1 (the
// near-diagonal band of the chaos double sum converges like delta^{2H-1}), so
// the distribution-law criteria run at high resolution where the measured
// exact bias sits well inside the MC 3-SE band.
constexpr int kLawPointsPerUnit = 2048;

// ---------------------------------------------------------------------------
// C2: Var(Z_t) / t^{2H} = 1 within 3 MC standard errors at t in {0.5, 1, 2}.
bool c2_variance_normalization(std::string& detail) {
    const HurstParams params(0.7);
    const KernelConstants& consts = calibration_for(params, kLawPointsPerUnit);
    const int n_seeds = 2000;
    const std::size_t n_points = 2 * kLawPointsPerUnit + 1;  // T = 2
    const std::size_t idx[] = {kLawPointsPerUnit / 2, kLawPointsPerUnit, 2 * kLawPointsPerUnit};
    std::vector<std::vector<double>> z(3);
    for (int k = 0; k < n_seeds; ++k) {
        const auto lattice = generate_brownian(n_points, consts.grid_delta, derive_seed(0xC2, k));
        const auto path = rosenblatt_path_fast(lattice, params, consts);
        for (int j = 0; j < 3; ++j) z[j].push_back(path.values[idx[j]]);
    }
    const double ts[] = {0.5, 1.0, 2.0};
    bool ok = true;
    std::ostringstream out;
    for (int j = 0; j < 3; ++j) {
        const MomentSummary m = moments_of(z[j]);
        const double target = std::pow(ts[j], 1.4);
        const double dev = std::abs(m.variance - target) / m.se_variance;
        ok = ok && dev <= 3.0;
        out << (j ? "; " : "") << "t=" << ts[j] << ": var/t^2H = "
            << num(m.variance / target) << " (" << num(dev) << " SE)";
    }
    detail = out.str() + " over " + std::to_string(n_seeds) + " seeds";
    return ok;
}

// ---------------------------------------------------------------------------
// C3: E[Z_s Z_t] matches (s^{2H} + t^{2H} - |t-s|^{2H})/2 within 3 SE on the
// 3x3 grid {1, 1.5, 2}^2 plus the (0.5, 1) pair.
bool c3_covariance_law(std::string& detail) {
    const HurstParams params(0.7);
    const KernelConstants& consts = calibration_for(params, kLawPointsPerUnit);
    const int n_seeds = 5000;
    const std::size_t n_points = 2 * kLawPointsPerUnit + 1;  // T = 2
    const std::size_t idx[] = {kLawPointsPerUnit / 2, kLawPointsPerUnit,
                               3 * kLawPointsPerUnit / 2, 2 * kLawPointsPerUnit};
    const double ts[] = {0.5, 1.0, 1.5, 2.0};
    std::vector<std::vector<double>> z(4);
    for (int k = 0; k < n_seeds; ++k) {
        const auto lattice = generate_brownian(n_points, consts.grid_delta, derive_seed(0xC3, k));
        const auto path = rosenblatt_path_fast(lattice, params, consts);
        for (int j = 0; j < 4; ++j) z[j].push_back(path.values[idx[j]]);
    }
    // all (a, b) with a <= b from {1, 1.5, 2}, plus the mixed pair (0.5, 1)
    const std::pair<int, int> entries[] = {{1, 1}, {1, 2}, {1, 3}, {2, 2},
                                           {2, 3}, {3, 3}, {0, 1}};
    bool ok = true;
    double worst_dev = 0.0;
    for (const auto& [a, b] : entries) {
        std::vector<double> products(n_seeds);
        for (int k = 0; k < n_seeds; ++k) products[k] = z[a][k] * z[b][k];
        const MomentSummary m = moments_of(products);
        const double target = covariance_oracle(params, ts[a], ts[b]);
        const double dev = std::abs(m.mean - target) / m.se_mean;
        worst_dev = std::max(worst_dev, dev);
        ok = ok && dev <= 3.0;
    }
    detail = "max standardized deviation " + num(worst_dev) +
             " SE over the {1,1.5,2}^2 grid and the (0.5,1) pair, " + std::to_string(n_seeds) +
             " seeds";
    return ok;
}

// ---------------------------------------------------------------------------
// C4: Var(int_0^1 t dZ_t) within 3 SE of the weighted double quadrature
// H(2H-1) iint uv|u-v|^{2H-2} du dv.
bool c4_isometry(std::string& detail) {
    const HurstParams params(0.7);
    const KernelConstants& consts = calibration_for(params, kLawPointsPerUnit);
    const double reference = oracles::isometry_variance_quadrature(0.7);
    const int n_seeds = 5000;
    std::vector<double> integrals(n_seeds);
    for (int k = 0; k < n_seeds; ++k) {
        const auto lattice =
            generate_brownian(kLawPointsPerUnit + 1, consts.grid_delta, derive_seed(0xC4, k));
        const auto path = rosenblatt_path_fast(lattice, params, consts);
        integrals[k] = wiener_rosenblatt_integral(path.times, path);
    }
    const MomentSummary m = moments_of(integrals);
    const double dev = std::abs(m.variance - reference) / m.se_variance;
    detail = "MC var " + num(m.variance) + " vs quadrature " + num(reference) + " (" + num(dev) +
             " SE, " + std::to_string(n_seeds) + " seeds)";
    return dev <= 3.0;
}

// ---------------------------------------------------------------------------
// C5: Lambda_{n,i} and gamma_n^{-1} at n = 200 near their deterministic
// limits for alpha = 1, H = 0.7, basis {sin:1, cos:1}, mu = (1, 0).
bool c5_deterministic_limits(std::string& detail) {
    ExperimentConfig config{
        .model = ModelParams{make_drift({"sin:1", "cos:1"}, {1.0, 0.0}), 1.0, HurstParams(0.7)}};
    config.points_per_unit = 128;
    config.burn_in = 40.0;
    const KernelConstants& consts = calibration_for(config.model.hurst, config.points_per_unit);

    const int K = 200;
    std::vector<double> l1, l2, ginv;
    for (int k = 0; k < K; ++k) {
        const SamplePath path =
            simulate_stationary_path(config, consts, 200, derive_seed(0xC5, k));
        const LseComponents comps = compute_lse_components(path, config.model.drift);
        l1.push_back(comps.lambda_n[0]);
        l2.push_back(comps.lambda_n[1]);
        ginv.push_back(comps.gamma_n_inv);
    }
    struct Target {
        const char* name;
        std::vector<double>* sample;
        double limit;
    };
    Target targets[] = {
        {"Lambda_1", &l1, 0.02470452303185764},
        {"Lambda_2", &l2, -0.15522309613464762},
        {"gamma^-1", &ginv, 0.6210846722521527},
    };
    bool ok = true;
    std::ostringstream out;
    for (const auto& t : targets) {
        const MomentSummary m = moments_of(*t.sample);
        const double dev = std::abs(m.mean - t.limit) / m.se_mean;
        ok = ok && dev <= 3.0;
        out << t.name << " = " << num(m.mean) << " vs " << num(t.limit) << " (" << num(dev)
            << " SE); ";
    }
    detail = out.str() + "n = 200, K = " + std::to_string(K);
    return ok;
}

// ---------------------------------------------------------------------------
// C6: closed forms against independent numerics, randomized: the stationary
// mean vs truncated quadrature (<= 1e-8), and the block inverse of Q_n vs
// dense inversion (<= 1e-10 relative).
bool c6_closed_forms(std::string& detail) {
    std::mt19937_64 rng(0xC6);
    std::uniform_real_distribution<double> alpha_draw(0.3, 3.0);
    std::uniform_real_distribution<double> h_draw(0.55, 0.95);
    std::uniform_real_distribution<double> mu_draw(-2.0, 2.0);
    std::uniform_real_distribution<double> t_draw(0.0, 2.0);
    std::uniform_int_distribution<int> kind_draw(0, 6);

    const char* pool[] = {"const", "sin:1", "sin:2", "sin:3", "cos:1", "cos:2", "cos:3"};
    double worst_h = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        DriftSpec drift;
        std::vector<int> picks;
        std::uniform_int_distribution<int> size_draw(1, 4);
        const int p = size_draw(rng);
        while (static_cast<int>(picks.size()) < p) {
            const int c = kind_draw(rng);
            if (std::find(picks.begin(), picks.end(), c) == picks.end()) picks.push_back(c);
        }
        for (int c : picks) {
            drift.basis.push_back(TrigBasisFunction::parse(pool[c]));
            drift.mu.push_back(mu_draw(rng));
        }
        const ModelParams model{drift, alpha_draw(rng), HurstParams(h_draw(rng))};
        const double t = t_draw(rng);
        const double closed = eval_h_tilde(model, t);
        const double quad = oracles::h_tilde_quadrature(model, t);
        worst_h = std::max(worst_h, std::abs(closed - quad));
    }

    std::uniform_real_distribution<double> ginv_draw(0.05, 5.0);
    std::uniform_int_distribution<int> p_draw(1, 5);
    std::uniform_int_distribution<int> n_draw(5, 500);
    double worst_q = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        LseComponents comps;
        const int p = p_draw(rng);
        comps.horizon_n = n_draw(rng);
        comps.p = static_cast<std::size_t>(p);
        const double n = comps.horizon_n;
        comps.a_n.resize(comps.p);
        comps.lambda_n.resize(comps.p);
        double lambda_sq = 0.0;
        for (int i = 0; i < p; ++i) {
            comps.lambda_n[i] = mu_draw(rng);
            comps.a_n[i] = comps.lambda_n[i] * n;
            lambda_sq += comps.lambda_n[i] * comps.lambda_n[i];
        }
        comps.gamma_n_inv = ginv_draw(rng);
        comps.b_n = n * (comps.gamma_n_inv + lambda_sq);
        comps.Q_n = Eigen::MatrixXd::Zero(p + 1, p + 1);
        comps.Q_n.topLeftCorner(p, p) = n * Eigen::MatrixXd::Identity(p, p);
        Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(comps.a_n.data(), p);
        comps.Q_n.topRightCorner(p, 1) = -a;
        comps.Q_n.bottomLeftCorner(1, p) = -a.transpose();
        comps.Q_n(p, p) = comps.b_n;

        const Eigen::MatrixXd closed = invert_Qn(comps);
        const Eigen::MatrixXd dense = comps.Q_n.inverse();
        worst_q = std::max(worst_q, (closed - dense).cwiseAbs().maxCoeff() /
                                        dense.cwiseAbs().maxCoeff());
    }

    detail = "max |h~ closed - quadrature| = " + num(worst_h) +
             " (tol 1e-8); max relative inverse deviation = " + num(worst_q) +
             " (tol 1e-10); 200 random draws each";
    return worst_h <= 1e-8 && worst_q <= 1e-10;
}

// Shared by C7/C8: the A1-configuration rate experiment.
const ExperimentReport& a1_rate_report() {
    static const ExperimentReport report = [] {
        ExperimentConfig config{
            .model = ModelParams{make_drift({"const", "sin:1"}, {1.0, 1.0}), 1.0,
                                 HurstParams(0.7)}};
        config.horizons = {50, 100, 200};
        config.replicates = 500;
        config.points_per_unit = 32;
        config.burn_in = 40.0;
        config.estimator = EstimatorKind::alt_a1;
        config.phi_extra = TrigBasisFunction::parse("cos:1");
        config.base_seed = 7007;
        return run_rate(config);
    }();
    return report;
}

// ---------------------------------------------------------------------------
// C7: the alpha estimates of both alternative estimators are consistent: RMSE
// strictly decreasing over horizons {50, 100, 200} at 500 replicates.
bool c7_consistency(std::string& detail) {
    const ExperimentReport& a1 = a1_rate_report();
    const std::size_t alpha_idx = a1.p;  // last coordinate

    ExperimentConfig star{
        .model = ModelParams{make_drift({"const"}, {1.0}), 1.0, HurstParams(0.7)}};
    star.horizons = {50, 100, 200};
    star.replicates = 500;
    star.points_per_unit = 32;
    star.burn_in = 40.0;
    star.estimator = EstimatorKind::alt_a1star;
    star.base_seed = 7008;
    const ExperimentReport a1star = run_consistency(star);

    auto decreasing = [](const ExperimentReport& rep, std::size_t coord, std::string& seq) {
        std::ostringstream out;
        bool ok = true;
        double prev = 0.0;
        for (std::size_t h = 0; h < rep.horizons.size(); ++h) {
            const double rmse = rep.horizons[h].coords[coord].rmse;
            if (h > 0 && !(rmse < prev)) ok = false;
            out << (h ? " > " : "") << num(rmse);
            prev = rmse;
        }
        seq = out.str();
        return ok;
    };
    std::string seq_a1, seq_star;
    const bool ok_a1 = decreasing(a1, alpha_idx, seq_a1);
    const bool ok_star = decreasing(a1star, 1, seq_star);
    detail = "RMSE(alpha) A1: " + seq_a1 + (ok_a1 ? "" : " [not decreasing]") +
             "; A1*: " + seq_star + (ok_star ? "" : " [not decreasing]") +
             "; horizons {50,100,200}, 500 replicates";
    return ok_a1 && ok_star;
}

// ---------------------------------------------------------------------------
// C8: log-log RMSE slope of a coordinate with non-degenerate limit scale
// inside [-(1-H)-0.15, -(1-H)+0.15] at H = 0.7.
bool c8_rate(std::string& detail) {
    const ExperimentReport& a1 = a1_rate_report();
    // Coordinate mu_1 (the constant basis element): its limit scale is
    // integral(phi_1) * V = V, non-degenerate; the alpha coordinate of this
    // estimator decays faster than n^{H-1} (degenerate scale) and is not a
    // valid rate witness.
    const double slope = a1.rate_slope[0];
    const double half = a1.rate_half_width[0];
    const bool ok = slope >= -0.45 && slope <= -0.15;
    detail = "slope(mu_1) = " + num(slope) + " +/- " + num(half) +
             ", window [-0.45, -0.15] around H - 1 = -0.3";
    return ok;
}

// ---------------------------------------------------------------------------
// C9: limit distribution of n^{1-H}(alpha_bar^(1) - alpha) under A1*: the
// skewness sign matches the scaled Rosenblatt reference sample and the
// standardized mean/variance differences stay below 3.
bool c9_limit_distribution(std::string& detail) {
    ExperimentConfig config{
        .model = ModelParams{make_drift({"const"}, {1.0}), 1.0, HurstParams(0.7)}};
    config.horizons = {200};
    config.replicates = 1000;
    config.points_per_unit = 32;
    config.burn_in = 40.0;
    config.estimator = EstimatorKind::alt_a1star;
    config.base_seed = 7009;
    const ExperimentReport report = run_limit_distribution(config);

    const std::size_t alpha_idx = report.p;
    const MomentSummary& s = report.sample_moments[alpha_idx];
    const MomentSummary& r = report.reference_moments[alpha_idx];
    const double dev_mean =
        std::abs(s.mean - r.mean) / std::sqrt(s.se_mean * s.se_mean + r.se_mean * r.se_mean);
    const double dev_var = std::abs(s.variance - r.variance) /
                           std::sqrt(s.se_variance * s.se_variance + r.se_variance * r.se_variance);
    const bool sign_ok = s.skewness * r.skewness > 0.0;
    detail = "skew sample " + num(s.skewness) + " vs reference " + num(r.skewness) +
             (sign_ok ? " (signs match)" : " (SIGN MISMATCH)") + "; mean dev " + num(dev_mean) +
             " SE; var dev " + num(dev_var) + " SE; n = 200, K = 1000";
    return sign_ok && dev_mean <= 3.0 && dev_var <= 3.0;
}

// ---------------------------------------------------------------------------
// C10: the ergodic average (1/n) int phi (X - h~) dt has MC variance decaying
// with log-log slope within 0.3 of 2H - 2.
bool c10_ergodicity(std::string& detail) {
    ExperimentConfig config{
        .model = ModelParams{make_drift({"const"}, {0.0}), 1.0, HurstParams(0.7)}};
    config.horizons = {8, 16, 32, 64};
    config.replicates = 500;
    config.points_per_unit = 32;
    config.burn_in = 40.0;
    config.base_seed = 7010;
    const ExperimentReport report = run_ergodicity_check(config);

    const double slope = report.ergo_var_fit.slope;
    const double target = 2.0 * 0.7 - 2.0;
    const bool ok = std::abs(slope - target) <= 0.3;
    detail = "variance slope = " + num(slope) + " +/- " + num(report.ergo_var_fit.half_width) +
             ", target " + num(target) + " +/- 0.3; horizons {8,16,32,64}, 500 replicates";
    return ok;
}

// ---------------------------------------------------------------------------
// C11: a Monte Carlo run rerun from its manifest alone reproduces the output
// files byte for byte.
bool c11_reproducibility(std::string& detail) {
    const char* bin = std::getenv("ROU_LAB_BIN");
    if (!bin) {
        detail = "ROU_LAB_BIN is not set; cannot locate the CLI binary";
        return false;
    }
    TempDir dir("acceptance-c11");
    const auto config = dir / "config.ini";
    spit(config,
         "[model]\n"
         "H = 0.7\n"
         "alpha = 1.0\n"
         "basis = sin:1, cos:1\n"
         "mu = 1.0, 0.0\n"
         "[grid]\n"
         "points_per_unit = 16\n"
         "[experiment]\n"
         "horizons = 8, 16\n"
         "replicates = 50\n"
         "burn_in = 4\n"
         "estimator = lse\n"
         "base_seed = 11\n");

    auto run = [&](const std::string& args) {
        const std::string command = std::string(bin) + " " + args + " > /dev/null 2>&1";
        return std::system(command.c_str()) == 0;
    };
    const auto run1 = dir / "run1";
    const auto run2 = dir / "run2";
    const auto run3 = dir / "run3";
    if (!run("montecarlo --experiment consistency --config " + config.string() + " --out " +
             run1.string()) ||
        !run("montecarlo --experiment consistency --config " + config.string() + " --out " +
             run2.string()) ||
        !run("montecarlo --from-manifest " + (run1 / "manifest.json").string() + " --out " +
             run3.string())) {
        detail = "CLI invocation failed";
        return false;
    }
    bool ok = true;
    std::ostringstream out;
    for (const char* name : {"replicates.csv", "summary.json", "manifest.json"}) {
        const std::string a = slurp(run1 / name);
        const bool same = !a.empty() && a == slurp(run2 / name) && a == slurp(run3 / name);
        ok = ok && same;
        out << name << (same ? " identical; " : " DIFFERS; ");
    }
    detail = out.str() + "rerun + manifest replay";
    return ok;
}

struct Criterion {
    std::string id;
    std::string label;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"C1", "chaos-representation oracle equivalence", c1_generator_equivalence},
        {"C2", "variance normalization Var(Z_t) = t^{2H}", c2_variance_normalization},
        {"C3", "covariance law on a 3x3 grid", c3_covariance_law},
        {"C4", "Wiener-Rosenblatt isometry", c4_isometry},
        {"C5", "deterministic limits of path statistics", c5_deterministic_limits},
        {"C6", "closed forms vs independent numerics", c6_closed_forms},
        {"C7", "consistency of the alternative estimators", c7_consistency},
        {"C8", "convergence rate n^{H-1}", c8_rate},
        {"C9", "limit distribution under A1*", c9_limit_distribution},
        {"C10", "ergodic-average variance decay", c10_ergodicity},
        {"C11", "byte-level reproducibility from the manifest", c11_reproducibility},
    };

    std::vector<std::string> selected(argv + 1, argv + argc);
    auto wanted = [&](const std::string& id) {
        return selected.empty() ||
               std::find(selected.begin(), selected.end(), id) != selected.end();
    };

    int passed = 0, failed = 0;
    for (const auto& criterion : criteria) {
        if (!wanted(criterion.id)) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << criterion.id << " " << criterion.label
                  << "\n       " << detail << "\n";
        std::cout.flush();
        (ok ? passed : failed) += 1;
    }
    std::cout << "acceptance: " << passed << " passed, " << failed << " failed\n";
    return failed == 0 ? 0 : 1;
}

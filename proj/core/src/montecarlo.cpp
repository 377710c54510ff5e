#include "roulab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "roulab/io.hpp"

namespace roulab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Runs fn(0..n_tasks-1) over a small thread pool. Tasks are claimed from an
/// atomic counter; any task index may run on any worker, so everything fn
/// writes must be indexed by task. The first exception is rethrown after all
/// workers drain.
template <typename Fn>
void parallel_for(int n_tasks, int workers, Fn&& fn) {
    workers = std::clamp(workers, 1, std::max(1, n_tasks));
    if (workers == 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                while (true) {
                    const int i = next.fetch_add(1, std::memory_order_relaxed);
                    if (i >= n_tasks) break;
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
                next.store(n_tasks, std::memory_order_relaxed);
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

int burn_in_periods(double burn_in) {
    if (burn_in < 0.0) {
        throw std::invalid_argument("burn_in must be nonnegative");
    }
    return static_cast<int>(std::ceil(burn_in - 1e-12));
}

std::vector<double> theta_true(const ModelParams& model) {
    std::vector<double> theta = model.drift.mu;
    theta.push_back(model.alpha);
    return theta;
}

std::vector<std::string> coordinate_names(std::size_t p) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= p; ++i) {
        names.push_back("mu_hat_" + std::to_string(i));
    }
    names.push_back("alpha_hat");
    return names;
}

/// Bias/RMSE aggregation over the errors of one coordinate.
CoordinateStats coordinate_stats(std::span<const double> errors) {
    CoordinateStats stats{kNaN, kNaN, kNaN, kNaN};
    const std::size_t m = errors.size();
    if (m == 0) return stats;
    double mean = 0.0, mean_sq = 0.0;
    for (double e : errors) {
        mean += e;
        mean_sq += e * e;
    }
    mean /= m;
    mean_sq /= m;
    stats.bias = mean;
    stats.rmse = std::sqrt(mean_sq);
    if (m >= 2) {
        double var_e = 0.0, var_sq = 0.0;
        for (double e : errors) {
            var_e += (e - mean) * (e - mean);
            var_sq += (e * e - mean_sq) * (e * e - mean_sq);
        }
        var_e /= (m - 1);
        var_sq /= (m - 1);
        stats.se_bias = std::sqrt(var_e / m);
        // Delta method: Var(rmse) ~ Var(mean e^2) / (4 rmse^2).
        stats.se_rmse = stats.rmse > 0.0 ? std::sqrt(var_sq / m) / (2.0 * stats.rmse) : 0.0;
    } else {
        stats.se_bias = 0.0;
        stats.se_rmse = 0.0;
    }
    return stats;
}

std::vector<HorizonSummary> aggregate_horizons(const ExperimentConfig& config,
                                               const std::vector<ReplicateRecord>& records) {
    const std::vector<double> truth = theta_true(config.model);
    std::vector<HorizonSummary> summaries;
    for (int horizon : config.horizons) {
        HorizonSummary summary{horizon, 0, 0, {}};
        std::vector<std::vector<double>> errors(truth.size());
        for (const auto& rec : records) {
            if (rec.horizon != horizon) continue;
            if (rec.theta_hat.size() != truth.size()) {
                ++summary.excluded;
                continue;
            }
            ++summary.used;
            for (std::size_t j = 0; j < truth.size(); ++j) {
                errors[j].push_back(rec.theta_hat[j] - truth[j]);
            }
        }
        for (const auto& errs : errors) {
            summary.coords.push_back(coordinate_stats(errs));
        }
        summaries.push_back(std::move(summary));
    }
    return summaries;
}

/// Shared replicate loop for consistency/rate/limit-dist: common random
/// numbers across horizons (the seed depends on the replicate index only).
std::vector<ReplicateRecord> run_sweep(const ExperimentConfig& config) {
    const KernelConstants& consts = calibration_for(config.model.hurst, config.points_per_unit);
    const int n_horizons = static_cast<int>(config.horizons.size());
    const int K = config.replicates;
    std::vector<ReplicateRecord> records(static_cast<std::size_t>(n_horizons) * K);
    parallel_for(n_horizons * K, config.workers, [&](int task) {
        const int h = task / K;
        const int k = task % K;
        ReplicateRecord rec;
        rec.replicate = k;
        rec.seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(k));
        rec.horizon = config.horizons[h];
        rec.gamma_n_inv = kNaN;
        try {
            const SamplePath path =
                simulate_stationary_path(config, consts, rec.horizon, rec.seed);
            const EstimateResult est = estimate_on_path(config, path);
            rec.theta_hat = est.theta_hat;
            if (auto it = est.diagnostics.find("gamma_n_inv"); it != est.diagnostics.end()) {
                rec.gamma_n_inv = it->second;
            }
            rec.flag = est.pathwise_surrogate ? "surrogate" : "ok";
        } catch (const degenerate_path_error&) {
            rec.flag = "degenerate_path";
        } catch (const near_zero_denominator_error&) {
            rec.flag = "near_zero_denominator";
        } catch (const estimator_error&) {
            rec.flag = "estimator_error";
        }
        records[task] = std::move(rec);
    });
    return records;
}

/// Per-coordinate scale c_j such that the limit of n^{1-H}(theta_hat_j -
/// theta_j) is c_j * V for a single Rosenblatt variable V. NaN marks
/// coordinates whose limit mixes two chaos variables with uncharacterized
/// joint law (no marginal reference is constructible).
std::vector<double> reference_scales(const ExperimentConfig& config) {
    const ModelLimits limits = compute_limits(config.model);
    const std::size_t p = config.model.drift.basis.size();
    std::vector<double> scale(p + 1, kNaN);
    switch (config.estimator) {
        case EstimatorKind::lse: {
            for (std::size_t i = 0; i < p; ++i) {
                scale[i] = limits.law.integrals_phi[i];
            }
            scale[p] = 0.0;
            break;
        }
        case EstimatorKind::alt_a1: {
            if (!config.phi_extra) break;
            const double ip = config.phi_extra->integral01();
            const double inner = h_tilde_inner(config.model, *config.phi_extra);
            if (std::abs(inner) < 1e-12) break;  // A1 needs <phi_extra, h_tilde> != 0
            const double ratio = ip / inner;
            for (std::size_t i = 0; i < p; ++i) {
                scale[i] = limits.law.integrals_phi[i] - limits.lambda[i] * ratio;
            }
            scale[p] = -ratio;
            break;
        }
        case EstimatorKind::alt_a1star: {
            const double cb = limits.law.C_alpha * limits.law.B_H;
            scale[p] = -cb;
            for (std::size_t i = 0; i < p; ++i) {
                const double direct = limits.law.integrals_phi[i];
                const double cross = -limits.lambda[i] * cb;
                const bool has_direct = std::abs(direct) > 1e-12;
                const bool has_cross = std::abs(cross) > 1e-12;
                if (has_direct && has_cross) {
                    scale[i] = kNaN;  // mixes V and G_infty: joint law not characterized
                } else {
                    scale[i] = has_direct ? direct : (has_cross ? cross : 0.0);
                }
            }
            break;
        }
    }
    return scale;
}

void append_ergodicity_tail(const ExperimentConfig& config, ExperimentReport& report,
                            const std::vector<std::vector<double>>& acv_rows,
                            const std::vector<double>& lags) {
    const int n_horizons = static_cast<int>(config.horizons.size());
    report.ergo_mean.assign(n_horizons, kNaN);
    report.ergo_se_mean.assign(n_horizons, kNaN);
    report.ergo_variance.assign(n_horizons, kNaN);
    report.ergo_se_variance.assign(n_horizons, kNaN);
    for (int h = 0; h < n_horizons; ++h) {
        std::vector<double> stats;
        for (const auto& rec : report.records) {
            if (rec.horizon == config.horizons[h] && !rec.theta_hat.empty()) {
                stats.push_back(rec.theta_hat[0]);
            }
        }
        const MomentSummary m = moments_of(stats);
        report.ergo_mean[h] = m.mean;
        report.ergo_se_mean[h] = m.se_mean;
        report.ergo_variance[h] = m.variance;
        report.ergo_se_variance[h] = m.se_variance;
    }
    std::vector<double> ns(config.horizons.begin(), config.horizons.end());
    report.ergo_var_fit = fit_loglog(ns, report.ergo_variance);

    report.ergo_lags = lags;
    report.ergo_autocov.assign(lags.size(), kNaN);
    report.ergo_autocov_se.assign(lags.size(), kNaN);
    for (std::size_t l = 0; l < lags.size(); ++l) {
        std::vector<double> vals;
        for (const auto& row : acv_rows) {
            if (l < row.size() && std::isfinite(row[l])) vals.push_back(row[l]);
        }
        const MomentSummary m = moments_of(vals);
        report.ergo_autocov[l] = m.mean;
        report.ergo_autocov_se[l] = m.se_mean;
    }
    report.ergo_cov_fit = fit_loglog(report.ergo_lags, report.ergo_autocov);
}

nlohmann::json moments_json(const MomentSummary& m) {
    return {{"count", m.count},         {"mean", m.mean},
            {"variance", m.variance},   {"skewness", m.skewness},
            {"se_mean", m.se_mean},     {"se_variance", m.se_variance},
            {"se_skewness", m.se_skewness}};
}

nlohmann::json slope_json(const SlopeFit& fit) {
    return {{"slope", fit.slope}, {"half_width", fit.half_width}};
}

TrigBasisFunction basis_from_json_token(const nlohmann::json& j) {
    if (!j.is_string()) {
        throw std::invalid_argument("config: basis entries must be strings");
    }
    return TrigBasisFunction::parse(j.get<std::string>());
}

}  // namespace

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::consistency:
            return "consistency";
        case ExperimentKind::rate:
            return "rate";
        case ExperimentKind::limit_dist:
            return "limit-dist";
        case ExperimentKind::ergodicity:
            return "ergodicity";
    }
    throw std::logic_error("experiment_name: invalid kind");
}

ExperimentKind parse_experiment(const std::string& name) {
    if (name == "consistency") return ExperimentKind::consistency;
    if (name == "rate") return ExperimentKind::rate;
    if (name == "limit-dist") return ExperimentKind::limit_dist;
    if (name == "ergodicity") return ExperimentKind::ergodicity;
    throw std::invalid_argument(
        "unknown experiment '" + name +
        "' (expected consistency, rate, limit-dist, or ergodicity)");
}

void validate_config(const ExperimentConfig& config, ExperimentKind kind) {
    validate_drift(config.model.drift);
    if (!(config.model.alpha > 0.0)) {
        throw std::invalid_argument("config: alpha must be positive");
    }
    if (config.horizons.empty()) {
        throw std::invalid_argument("config: at least one horizon is required");
    }
    for (std::size_t i = 0; i < config.horizons.size(); ++i) {
        if (config.horizons[i] < 1) {
            throw std::invalid_argument("config: horizons must be positive integers");
        }
        if (i > 0 && config.horizons[i] <= config.horizons[i - 1]) {
            throw std::invalid_argument("config: horizons must be strictly increasing");
        }
    }
    if (config.replicates < 2) {
        throw std::invalid_argument("config: replicates must be >= 2");
    }
    if (config.points_per_unit < 16) {
        throw std::invalid_argument("config: points_per_unit must be >= 16");
    }
    if (config.burn_in < 0.0) {
        throw std::invalid_argument("config: burn_in must be nonnegative");
    }
    if (config.workers < 1) {
        throw std::invalid_argument("config: workers must be >= 1");
    }
    if (config.model.alpha / config.points_per_unit >= 1.0) {
        throw std::invalid_argument("config: alpha/points_per_unit >= 1 breaks the Euler scheme");
    }
    switch (kind) {
        case ExperimentKind::consistency:
            break;
        case ExperimentKind::rate:
            if (config.horizons.size() < 3) {
                throw std::invalid_argument("rate: at least 3 horizons are required");
            }
            if (config.horizons.back() < 4 * config.horizons.front()) {
                throw std::invalid_argument("rate: horizons must span a factor >= 4");
            }
            break;
        case ExperimentKind::limit_dist:
            if (config.horizons.size() != 1) {
                throw std::invalid_argument("limit-dist: exactly one horizon is required");
            }
            if (config.replicates < 1000) {
                throw std::invalid_argument("limit-dist: replicates must be >= 1000");
            }
            break;
        case ExperimentKind::ergodicity:
            if (!(config.burn_in > 0.0)) {
                throw std::invalid_argument("ergodicity: burn_in must be positive");
            }
            break;
    }
    if (config.estimator == EstimatorKind::alt_a1 && config.phi_extra) {
        for (const auto& phi : config.model.drift.basis) {
            if (phi == *config.phi_extra) {
                throw std::invalid_argument("config: phi_extra must not be a basis element");
            }
        }
    }
    if (config.estimator == EstimatorKind::alt_a1star &&
        !classify_assumption(config.model.drift).a1_star) {
        throw std::invalid_argument("config: alt_a1star requires an A1*-classified basis");
    }
}

ExperimentConfig resolve_config(const ExperimentConfig& config, ExperimentKind kind) {
    validate_config(config, kind);
    ExperimentConfig resolved = config;
    if (resolved.estimator == EstimatorKind::alt_a1 && !resolved.phi_extra) {
        const Classification cls = classify_assumption(resolved.model.drift);
        if (!cls.suggested_phi) {
            throw std::invalid_argument(
                "config: alt_a1 on an A1* basis needs an explicit phi_extra");
        }
        resolved.phi_extra = cls.suggested_phi;
    }
    return resolved;
}

const KernelConstants& calibration_for(const HurstParams& hurst, int points_per_unit) {
    static std::mutex mu;
    static std::map<std::pair<double, int>, std::unique_ptr<KernelConstants>> cache;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(hurst.H, points_per_unit);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto consts = std::make_unique<KernelConstants>(calibrate_constants(hurst, points_per_unit));
        it = cache.emplace(key, std::move(consts)).first;
    }
    return *it->second;
}

SamplePath simulate_stationary_path(const ExperimentConfig& config, const KernelConstants& consts,
                                    int horizon, std::uint64_t seed) {
    const int burn = burn_in_periods(config.burn_in);
    const int total = burn + horizon;
    const int ppu = config.points_per_unit;
    const double delta = consts.grid_delta;
    const std::size_t n_points = static_cast<std::size_t>(total) * ppu + 1;

    RosenblattPath noise = [&] {
        if (config.zero_noise) {
            RosenblattPath z{std::vector<double>(n_points), std::vector<double>(n_points, 0.0),
                             config.model.hurst, consts};
            for (std::size_t k = 0; k < n_points; ++k) z.times[k] = k * delta;
            return z;
        }
        const BrownianLattice lattice = generate_brownian(n_points, delta, seed);
        return rosenblatt_path_fast(lattice, config.model.hurst, consts);
    }();

    const SamplePath full = simulate_rou(config.model, noise, 0.0);

    // Drop the burn-in and relabel to start at t = 0; the whole-period burn-in
    // keeps the 1-periodic drift phase aligned under the shift.
    const std::size_t k0 = static_cast<std::size_t>(burn) * ppu;
    SamplePath kept;
    kept.delta = delta;
    kept.times.resize(full.times.size() - k0);
    kept.values.assign(full.values.begin() + k0, full.values.end());
    for (std::size_t k = 0; k < kept.times.size(); ++k) {
        kept.times[k] = k * delta;
    }
    return kept;
}

EstimateResult estimate_on_path(const ExperimentConfig& config, const SamplePath& path) {
    switch (config.estimator) {
        case EstimatorKind::lse:
            return lse_estimate(path, config.model.drift);
        case EstimatorKind::alt_a1: {
            TrigBasisFunction phi{BasisKind::constant, 0};
            if (config.phi_extra) {
                phi = *config.phi_extra;
            } else {
                const Classification cls = classify_assumption(config.model.drift);
                if (!cls.suggested_phi) {
                    throw estimator_error("alt_a1: no phi_extra available for an A1* basis");
                }
                phi = *cls.suggested_phi;
            }
            return alt_estimate_a1(path, config.model.drift, phi);
        }
        case EstimatorKind::alt_a1star:
            return alt_estimate_a1star(path, config.model.drift, config.model.hurst);
    }
    throw std::logic_error("estimate_on_path: invalid estimator kind");
}

ExperimentReport run_consistency(const ExperimentConfig& config) {
    const ExperimentConfig cfg = resolve_config(config, ExperimentKind::consistency);
    ExperimentReport report;
    report.kind = ExperimentKind::consistency;
    report.p = cfg.model.drift.basis.size();
    report.estimator_label = estimator_name(cfg.estimator);
    report.coord_names = coordinate_names(report.p);
    report.records = run_sweep(cfg);
    report.horizons = aggregate_horizons(cfg, report.records);
    return report;
}

ExperimentReport run_rate(const ExperimentConfig& config) {
    const ExperimentConfig cfg = resolve_config(config, ExperimentKind::rate);
    ExperimentReport report;
    report.kind = ExperimentKind::rate;
    report.p = cfg.model.drift.basis.size();
    report.estimator_label = estimator_name(cfg.estimator);
    report.coord_names = coordinate_names(report.p);
    report.records = run_sweep(cfg);
    report.horizons = aggregate_horizons(cfg, report.records);

    const std::size_t n_coords = report.p + 1;
    report.rate_slope.assign(n_coords, kNaN);
    report.rate_half_width.assign(n_coords, kNaN);
    std::vector<double> ns(cfg.horizons.begin(), cfg.horizons.end());
    for (std::size_t j = 0; j < n_coords; ++j) {
        std::vector<double> rmse;
        for (const auto& h : report.horizons) {
            rmse.push_back(h.coords[j].rmse);
        }
        const SlopeFit fit = fit_loglog(ns, rmse);
        report.rate_slope[j] = fit.slope;
        report.rate_half_width[j] = fit.half_width;
    }
    return report;
}

ExperimentReport run_limit_distribution(const ExperimentConfig& config) {
    const ExperimentConfig cfg = resolve_config(config, ExperimentKind::limit_dist);
    ExperimentReport report;
    report.kind = ExperimentKind::limit_dist;
    report.p = cfg.model.drift.basis.size();
    report.estimator_label = estimator_name(cfg.estimator);
    report.coord_names = coordinate_names(report.p);
    report.records = run_sweep(cfg);
    report.horizons = aggregate_horizons(cfg, report.records);
    report.limit_horizon = cfg.horizons.front();

    const std::vector<double> truth = theta_true(cfg.model);
    const double rate_pow = std::pow(static_cast<double>(report.limit_horizon),
                                     1.0 - cfg.model.hurst.H);
    const std::size_t n_coords = truth.size();
    std::vector<std::vector<double>> samples(n_coords);
    for (const auto& rec : report.records) {
        if (rec.theta_hat.size() != n_coords) continue;
        for (std::size_t j = 0; j < n_coords; ++j) {
            samples[j].push_back(rate_pow * (rec.theta_hat[j] - truth[j]));
        }
    }
    report.sample_moments.resize(n_coords);
    for (std::size_t j = 0; j < n_coords; ++j) {
        report.sample_moments[j] = moments_of(samples[j]);
    }

    const KernelConstants& consts = calibration_for(cfg.model.hurst, cfg.points_per_unit);
    const std::vector<double> v_sample = simulate_rosenblatt_variable(
        cfg.model.hurst, consts, cfg.replicates, derive_seed(cfg.base_seed, std::uint64_t{1} << 32));
    report.v_moments = moments_of(v_sample);
    report.ref_v_scale = reference_scales(cfg);
    report.reference_moments.resize(n_coords);
    for (std::size_t j = 0; j < n_coords; ++j) {
        if (!std::isfinite(report.ref_v_scale[j])) {
            report.reference_moments[j] = MomentSummary{};
            report.reference_moments[j].mean = kNaN;
            report.reference_moments[j].variance = kNaN;
            report.reference_moments[j].skewness = kNaN;
            continue;
        }
        std::vector<double> scaled(v_sample.size());
        for (std::size_t k = 0; k < v_sample.size(); ++k) {
            scaled[k] = report.ref_v_scale[j] * v_sample[k];
        }
        report.reference_moments[j] = moments_of(scaled);
    }
    return report;
}

ExperimentReport run_ergodicity_check(const ExperimentConfig& config) {
    const ExperimentConfig cfg = resolve_config(config, ExperimentKind::ergodicity);
    const KernelConstants& consts = calibration_for(cfg.model.hurst, cfg.points_per_unit);
    ExperimentReport report;
    report.kind = ExperimentKind::ergodicity;
    report.p = cfg.model.drift.basis.size();
    report.coord_names = {"statistic"};

    const TrigBasisFunction phi = cfg.model.drift.basis.front();
    const int n_horizons = static_cast<int>(cfg.horizons.size());
    const int K = cfg.replicates;
    const int last_n = cfg.horizons.back();
    std::vector<double> lags;
    for (int lag : {1, 2, 4, 8}) {
        if (4 * lag <= last_n) lags.push_back(lag);
    }

    report.records.resize(static_cast<std::size_t>(n_horizons) * K);
    std::vector<std::vector<double>> acv_rows(K);
    parallel_for(n_horizons * K, cfg.workers, [&](int task) {
        const int h = task / K;
        const int k = task % K;
        const int horizon = cfg.horizons[h];
        ReplicateRecord rec;
        rec.replicate = k;
        rec.seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(k));
        rec.horizon = horizon;
        rec.gamma_n_inv = kNaN;
        const SamplePath path = simulate_stationary_path(cfg, consts, horizon, rec.seed);

        // Y~ = X - h~: the closed-form stationary mean centers the path.
        std::vector<double> centered(path.values.size());
        for (std::size_t i = 0; i < centered.size(); ++i) {
            centered[i] = path.values[i] - eval_h_tilde(cfg.model, path.times[i]);
        }
        SamplePath y{path.delta, path.times, centered};
        std::vector<double> g(path.times.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = phi(path.times[i]);
        }
        rec.theta_hat = {lebesgue_integral(g, y) / horizon};
        rec.flag = "ok";
        report.records[task] = std::move(rec);

        if (h == n_horizons - 1) {
            // Time-averaged lag products on the longest horizon feed the
            // autocovariance decay check.
            std::vector<double> row(lags.size(), kNaN);
            const int ppu = cfg.points_per_unit;
            for (std::size_t l = 0; l < lags.size(); ++l) {
                const std::size_t shift = static_cast<std::size_t>(lags[l]) * ppu;
                const std::size_t m = centered.size() - shift;
                double acc = 0.0;
                for (std::size_t i = 0; i + 1 < m; ++i) {
                    acc += 0.5 * (centered[i] * centered[i + shift] +
                                  centered[i + 1] * centered[i + 1 + shift]);
                }
                row[l] = acc * path.delta / (horizon - lags[l]);
            }
            acv_rows[k] = std::move(row);
        }
    });

    append_ergodicity_tail(cfg, report, acv_rows, lags);
    return report;
}

std::vector<double> simulate_rosenblatt_variable(const HurstParams& hurst,
                                                 const KernelConstants& consts, int n_samples,
                                                 std::uint64_t seed) {
    if (n_samples < 1) {
        throw std::invalid_argument("simulate_rosenblatt_variable: n_samples must be >= 1");
    }
    const std::size_t n_points = static_cast<std::size_t>(consts.points_per_unit) + 1;
    std::vector<double> sample(n_samples);
    for (int j = 0; j < n_samples; ++j) {
        const BrownianLattice lattice =
            generate_brownian(n_points, consts.grid_delta, derive_seed(seed, j));
        sample[j] = rosenblatt_path_fast(lattice, hurst, consts).values.back();
    }
    return sample;
}

MomentSummary moments_of(std::span<const double> sample) {
    MomentSummary m;
    m.count = static_cast<int>(sample.size());
    if (m.count == 0) {
        m.mean = m.variance = m.skewness = kNaN;
        m.se_mean = m.se_variance = m.se_skewness = kNaN;
        return m;
    }
    const double n = m.count;
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : sample) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    m.mean = mean;
    m.variance = m.count >= 2 ? m2 * n / (n - 1.0) : 0.0;
    m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : kNaN;
    m.se_mean = m.count >= 2 ? std::sqrt(m.variance / n) : kNaN;
    m.se_variance =
        m.count >= 2 ? std::sqrt(std::max(0.0, m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n) : kNaN;
    m.se_skewness = m.count >= 3 ? std::sqrt(6.0 * n * (n - 1.0) /
                                             ((n - 2.0) * (n + 1.0) * (n + 3.0)))
                                 : kNaN;
    return m;
}

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    const std::size_t m = lx.size();
    if (m < 2) {
        return {kNaN, kNaN};
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx <= 0.0) {
        return {kNaN, kNaN};
    }
    const double slope = sxy / sxx;
    double half_width = 0.0;
    if (m > 2) {
        double rss = 0.0;
        const double intercept = my - slope * mx;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = ly[i] - intercept - slope * lx[i];
            rss += r * r;
        }
        half_width = 2.0 * std::sqrt(rss / (m - 2) / sxx);
    }
    return {slope, half_width};
}

std::string replicates_csv(const ExperimentReport& report) {
    std::ostringstream out;
    if (report.kind == ExperimentKind::ergodicity) {
        out << "replicate,seed,n,statistic,flag\n";
        for (const auto& rec : report.records) {
            out << rec.replicate << ',' << rec.seed << ',' << rec.horizon << ','
                << (rec.theta_hat.empty() ? std::string{} : fmt_g17(rec.theta_hat[0])) << ','
                << rec.flag << '\n';
        }
        return out.str();
    }
    out << "replicate,seed,n,estimator";
    for (std::size_t i = 1; i <= report.p; ++i) {
        out << ",mu_hat_" << i;
    }
    out << ",alpha_hat,gamma_n_inv,flag\n";
    for (const auto& rec : report.records) {
        out << rec.replicate << ',' << rec.seed << ',' << rec.horizon << ','
            << report.estimator_label;
        for (std::size_t j = 0; j <= report.p; ++j) {
            out << ',';
            if (j < rec.theta_hat.size()) {
                out << fmt_g17(rec.theta_hat[j]);
            }
        }
        out << ',' << fmt_g17(rec.gamma_n_inv) << ',' << rec.flag << '\n';
    }
    return out.str();
}

std::string summary_json_text(const ExperimentConfig& config, const ExperimentReport& report) {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config_json_text(config));
    j["experiment"] = experiment_name(report.kind);
    j["coords"] = report.coord_names;

    nlohmann::json per_horizon = nlohmann::json::array();
    int excluded_total = 0;
    for (const auto& h : report.horizons) {
        nlohmann::json coords = nlohmann::json::array();
        for (std::size_t c = 0; c < h.coords.size(); ++c) {
            coords.push_back({{"name", report.coord_names[c]},
                              {"bias", h.coords[c].bias},
                              {"se_bias", h.coords[c].se_bias},
                              {"rmse", h.coords[c].rmse},
                              {"se_rmse", h.coords[c].se_rmse}});
        }
        per_horizon.push_back({{"horizon", h.horizon},
                               {"used", h.used},
                               {"excluded", h.excluded},
                               {"coords", coords}});
        excluded_total += h.excluded;
    }
    if (report.kind != ExperimentKind::ergodicity) {
        j["per_horizon"] = per_horizon;
        j["excluded_total"] = excluded_total;
    }

    if (report.kind == ExperimentKind::rate) {
        j["rate_slope"] = report.rate_slope;
        j["rate_half_width"] = report.rate_half_width;
    }
    if (report.kind == ExperimentKind::limit_dist) {
        nlohmann::json sample = nlohmann::json::array();
        nlohmann::json reference = nlohmann::json::array();
        for (std::size_t c = 0; c < report.sample_moments.size(); ++c) {
            sample.push_back(moments_json(report.sample_moments[c]));
            reference.push_back(moments_json(report.reference_moments[c]));
        }
        j["limit"] = {{"horizon", report.limit_horizon},
                      {"sample_moments", sample},
                      {"reference_moments", reference},
                      {"ref_v_scale", report.ref_v_scale},
                      {"v_moments", moments_json(report.v_moments)}};
    }
    if (report.kind == ExperimentKind::ergodicity) {
        j["ergodicity"] = {{"mean", report.ergo_mean},
                           {"se_mean", report.ergo_se_mean},
                           {"variance", report.ergo_variance},
                           {"se_variance", report.ergo_se_variance},
                           {"variance_fit", slope_json(report.ergo_var_fit)},
                           {"lags", report.ergo_lags},
                           {"autocov", report.ergo_autocov},
                           {"autocov_se", report.ergo_autocov_se},
                           {"autocov_fit", slope_json(report.ergo_cov_fit)}};
    }
    return j.dump(2) + "\n";
}

std::string config_json_text(const ExperimentConfig& config) {
    nlohmann::json j;
    j["H"] = config.model.hurst.H;
    j["alpha"] = config.model.alpha;
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& phi : config.model.drift.basis) {
        basis.push_back(phi.name());
    }
    j["basis"] = basis;
    j["mu"] = config.model.drift.mu;
    j["horizons"] = config.horizons;
    j["replicates"] = config.replicates;
    j["points_per_unit"] = config.points_per_unit;
    j["burn_in"] = config.burn_in;
    j["estimator"] = estimator_name(config.estimator);
    j["base_seed"] = config.base_seed;
    if (config.phi_extra) {
        j["phi_extra"] = config.phi_extra->name();
    }
    // workers is an execution detail, not part of the experiment definition:
    // results are worker-count invariant, so serializing it would put spurious
    // diffs into otherwise identical runs.
    j["zero_noise"] = config.zero_noise;
    return j.dump(2) + "\n";
}

ExperimentConfig config_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config JSON parse failure: ") + e.what());
    }
    try {
        DriftSpec drift;
        for (const auto& token : j.at("basis")) {
            drift.basis.push_back(basis_from_json_token(token));
        }
        drift.mu = j.at("mu").get<std::vector<double>>();
        ModelParams model{std::move(drift), j.at("alpha").get<double>(),
                          HurstParams(j.at("H").get<double>())};
        ExperimentConfig config{std::move(model),
                                j.at("horizons").get<std::vector<int>>(),
                                j.at("replicates").get<int>(),
                                j.at("points_per_unit").get<int>(),
                                parse_estimator(j.at("estimator").get<std::string>()),
                                j.at("base_seed").get<std::uint64_t>(),
                                j.at("burn_in").get<double>()};
        if (j.contains("phi_extra")) {
            config.phi_extra = basis_from_json_token(j.at("phi_extra"));
        }
        if (j.contains("zero_noise")) {
            config.zero_noise = j.at("zero_noise").get<bool>();
        }
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config JSON field failure: ") + e.what());
    }
}

}  // namespace roulab

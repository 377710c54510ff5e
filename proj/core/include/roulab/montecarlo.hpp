#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roulab/estimators.hpp"
#include "roulab/model.hpp"

namespace roulab {

enum class ExperimentKind { consistency, rate, limit_dist, ergodicity };

std::string experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

struct ExperimentConfig {
    ModelParams model;
    std::vector<int> horizons;  ///< whole periods, strictly increasing
    int replicates = 500;
    int points_per_unit = 64;
    EstimatorKind estimator = EstimatorKind::lse;
    std::uint64_t base_seed = 1;
    double burn_in = 40.0;  ///< time units; rounded up to whole periods
    /// phi_{p+1} for alt_a1; resolved from the classifier when absent.
    std::optional<TrigBasisFunction> phi_extra;
    /// Execution detail, never serialized: replicate results are invariant
    /// under the worker count (common random numbers per replicate).
    int workers = 1;
    /// Debug flag: drive the SDE with Z identically 0 (deterministic
    /// inverse problem; isolates discretization bias).
    bool zero_noise = false;
};

/// One replicate row. theta_hat is empty and gamma_n_inv NaN when the
/// estimator raised; flag records why ("ok", "surrogate" for LSE successes,
/// "degenerate_path", "near_zero_denominator", "estimator_error").
struct ReplicateRecord {
    int replicate;
    std::uint64_t seed;  ///< derived, = derive_seed(base_seed, replicate)
    int horizon;
    std::vector<double> theta_hat;
    double gamma_n_inv;
    std::string flag;
};

struct CoordinateStats {
    double bias, se_bias, rmse, se_rmse;
};

struct HorizonSummary {
    int horizon;
    int used;
    int excluded;
    std::vector<CoordinateStats> coords;  ///< p+1 entries
};

/// First three moments with MC standard errors (se_skewness is the
/// normal-theory scale, reported for orientation only).
struct MomentSummary {
    int count = 0;
    double mean = 0, variance = 0, skewness = 0;
    double se_mean = 0, se_variance = 0, se_skewness = 0;
};

struct SlopeFit {
    double slope;
    double half_width;  ///< 2 x OLS standard error of the slope
};

struct ExperimentReport {
    ExperimentKind kind;
    std::size_t p = 0;
    std::string estimator_label;  ///< CSV estimator column; empty for ergodicity
    std::vector<std::string> coord_names;
    std::vector<ReplicateRecord> records;  ///< ordered (horizon, replicate)
    std::vector<HorizonSummary> horizons;

    // rate experiments
    std::vector<double> rate_slope;       ///< per coordinate; NaN if unfittable
    std::vector<double> rate_half_width;

    // limit-distribution experiments
    int limit_horizon = 0;
    std::vector<MomentSummary> sample_moments;     ///< n^{1-H}(theta_hat - theta)
    std::vector<MomentSummary> reference_moments;  ///< scaled Rosenblatt sample
    std::vector<double> ref_v_scale;  ///< per-coordinate scale on V; NaN = no
                                      ///< constructible marginal reference
    MomentSummary v_moments;          ///< raw reference V sample

    // ergodicity experiments
    std::vector<double> ergo_mean, ergo_se_mean;
    std::vector<double> ergo_variance, ergo_se_variance;
    SlopeFit ergo_var_fit{};
    std::vector<double> ergo_lags, ergo_autocov, ergo_autocov_se;
    SlopeFit ergo_cov_fit{};
};

/// Validates the config for the given experiment kind; throws
/// std::invalid_argument with a descriptive message.
void validate_config(const ExperimentConfig& config, ExperimentKind kind);

/// Validated copy with phi_extra filled in from the classifier when the
/// alt_a1 estimator needs it and the config left it unset.
ExperimentConfig resolve_config(const ExperimentConfig& config, ExperimentKind kind);

/// Process-wide memoized calibration per (H, points_per_unit); thread-safe.
const KernelConstants& calibration_for(const HurstParams& hurst, int points_per_unit);

/// Simulates one stationary-regime replicate on [0, horizon]: burn-in of
/// ceil(burn_in) whole periods is simulated and discarded, and the kept
/// segment is relabeled to start at t = 0 (whole-period burn-in keeps the
/// drift phase aligned). Pure function of (config, horizon, seed).
SamplePath simulate_stationary_path(const ExperimentConfig& config, const KernelConstants& consts,
                                    int horizon, std::uint64_t seed);

/// Dispatches to the configured estimator family.
EstimateResult estimate_on_path(const ExperimentConfig& config, const SamplePath& path);

ExperimentReport run_consistency(const ExperimentConfig& config);
ExperimentReport run_rate(const ExperimentConfig& config);
ExperimentReport run_limit_distribution(const ExperimentConfig& config);
ExperimentReport run_ergodicity_check(const ExperimentConfig& config);

/// Independent Z_1 samples, one unit lattice per sample, seeds derived from
/// (seed, sample index).
std::vector<double> simulate_rosenblatt_variable(const HurstParams& hurst,
                                                 const KernelConstants& consts, int n_samples,
                                                 std::uint64_t seed);

MomentSummary moments_of(std::span<const double> sample);
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Serialization used by both the CLI and the tests; byte-stable for fixed
/// inputs (17 significant digits, C locale).
std::string replicates_csv(const ExperimentReport& report);
std::string summary_json_text(const ExperimentConfig& config, const ExperimentReport& report);
std::string config_json_text(const ExperimentConfig& config);
ExperimentConfig config_from_json_text(const std::string& text);

}  // namespace roulab

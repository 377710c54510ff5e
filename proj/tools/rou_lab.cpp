/// rou_lab: simulation and estimation toolkit for the Rosenblatt
/// Ornstein-Uhlenbeck process with periodic mean.
///
/// Subcommands: calibrate, simulate-rosenblatt, simulate-rou, estimate,
/// montecarlo, classify. Exit codes: 0 success, 1 validation error,
/// 2 runtime/estimator failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ini_config.hpp"
#include "roulab/io.hpp"
#include "roulab/montecarlo.hpp"

namespace fs = std::filesystem;

namespace {

using namespace roulab;

int default_workers() {
    if (const char* env = std::getenv("ROU_LAB_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring invalid ROU_LAB_WORKERS='" << env << "'\n";
    }
    return 1;
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int workers = default_workers();
    bool force = false;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
    auto* config = cmd->add_option("--config", opts.config_path, "INI-style config file");
    if (config_required) config->required();
    cmd->add_option("--out", opts.out_dir, "Output directory (created if absent)");
    cmd->add_option("--seed", opts.seed, "Override the config's base_seed");
    cmd->add_option("--workers", opts.workers,
                    "Worker threads (default: ROU_LAB_WORKERS env var, else 1)");
    cmd->add_flag("--force", opts.force, "Overwrite existing output files");
    cmd->add_flag("--quiet", opts.quiet, "Suppress status messages");
}

ExperimentConfig load_config(const CommonOpts& opts) {
    ExperimentConfig config = cli::config_from_ini(cli::IniDocument::parse_file(opts.config_path));
    if (opts.seed) config.base_seed = *opts.seed;
    config.workers = opts.workers;
    return config;
}

fs::path prepare_out_dir(const CommonOpts& opts) {
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    return dir;
}

void emit_file(const fs::path& file, const std::string& content, const CommonOpts& opts) {
    if (!opts.force && fs::exists(file)) {
        throw std::invalid_argument("output exists: " + file.string() +
                                    " (pass --force to overwrite)");
    }
    atomic_write(file, content);
    if (!opts.quiet) std::cout << "wrote " << file.string() << "\n";
}

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot open '" + file.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

/// Same content as the persisted calibration document; hashing this text
/// fingerprints the calibration in manifests.
std::string calibration_json_text(const HurstParams& params, const KernelConstants& consts) {
    nlohmann::json j{{"H", params.H},
                     {"Hprime", params.Hprime},
                     {"c_Hprime", consts.c_hprime},
                     {"d_H", consts.d_h},
                     {"points_per_unit", consts.points_per_unit}};
    return j.dump(2) + "\n";
}

nlohmann::json manifest_base(const std::string& subcommand, const ExperimentConfig& config) {
    nlohmann::json m;
    m["tool"] = "rou_lab";
    m["subcommand"] = subcommand;
    m["config"] = nlohmann::json::parse(config_json_text(config));
    m["seed"] = config.base_seed;
    m["workers"] = config.workers;
    return m;
}

void attach_calibration(nlohmann::json& manifest, const ExperimentConfig& config,
                        const KernelConstants& consts) {
    const std::string text = calibration_json_text(config.model.hurst, consts);
    manifest["calibration"] = nlohmann::json::parse(text);
    manifest["calibration"]["hash"] = fnv1a_hex(text);
}

void run_calibrate(const CommonOpts& opts) {
    const ExperimentConfig config = load_config(opts);
    const KernelConstants& consts =
        calibration_for(config.model.hurst, config.points_per_unit);
    const fs::path dir = prepare_out_dir(opts);
    emit_file(dir / "calibration.json", calibration_json_text(config.model.hurst, consts), opts);

    nlohmann::json manifest = manifest_base("calibrate", config);
    attach_calibration(manifest, config, consts);
    manifest["outputs"] = {"calibration.json"};
    emit_file(dir / "manifest.json", manifest.dump(2) + "\n", opts);
}

/// Builds the driving noise on [0, horizons[0]] for the simulate subcommands.
RosenblattPath noise_for_simulation(const ExperimentConfig& config) {
    const int horizon = config.horizons.empty() ? 0 : config.horizons.front();
    if (horizon < 1) {
        throw std::invalid_argument("simulate: first horizon must be a positive whole number");
    }
    if (config.points_per_unit < 16) {
        throw std::invalid_argument("simulate: points_per_unit must be >= 16");
    }
    const KernelConstants& consts =
        calibration_for(config.model.hurst, config.points_per_unit);
    const std::size_t n_points =
        static_cast<std::size_t>(horizon) * config.points_per_unit + 1;
    const BrownianLattice lattice =
        generate_brownian(n_points, consts.grid_delta, config.base_seed);
    return rosenblatt_path_fast(lattice, config.model.hurst, consts);
}

void run_simulate_rosenblatt(const CommonOpts& opts) {
    const ExperimentConfig config = load_config(opts);
    const RosenblattPath path = noise_for_simulation(config);
    const fs::path dir = prepare_out_dir(opts);
    emit_file(dir / "path.csv", series_csv("t", "z", path.times, path.values), opts);

    nlohmann::json manifest = manifest_base("simulate-rosenblatt", config);
    attach_calibration(manifest, config, path.consts);
    manifest["outputs"] = {"path.csv"};
    emit_file(dir / "manifest.json", manifest.dump(2) + "\n", opts);
}

void run_simulate_rou(const CommonOpts& opts) {
    const ExperimentConfig config = load_config(opts);
    const RosenblattPath noise = noise_for_simulation(config);
    const SamplePath path = simulate_rou(config.model, noise, 0.0);
    const fs::path dir = prepare_out_dir(opts);
    emit_file(dir / "path.csv", series_csv("t", "x", path.times, path.values), opts);

    nlohmann::json manifest = manifest_base("simulate-rou", config);
    attach_calibration(manifest, config, noise.consts);
    manifest["outputs"] = {"path.csv"};
    emit_file(dir / "manifest.json", manifest.dump(2) + "\n", opts);
}

SamplePath read_path_csv(const fs::path& file) {
    std::istringstream in(read_file(file));
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("path file '" + file.string() + "' is empty");
    }
    SamplePath path;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("path file line " + std::to_string(line_no) +
                                        ": expected t,value");
        }
        try {
            path.times.push_back(std::stod(line.substr(0, comma)));
            path.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("path file line " + std::to_string(line_no) +
                                        ": malformed number");
        }
    }
    if (path.times.size() < 2) {
        throw std::invalid_argument("path file must hold at least 2 samples");
    }
    path.delta = path.times[1] - path.times[0];
    if (!(path.delta > 0.0)) {
        throw std::invalid_argument("path file: time grid must be increasing");
    }
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        if (std::abs(path.times[k] - (path.times[0] + k * path.delta)) > 1e-6) {
            throw std::invalid_argument("path file: time grid must be uniform");
        }
    }
    return path;
}

void run_estimate(const CommonOpts& opts, const std::string& path_file) {
    const ExperimentConfig config = load_config(opts);
    const std::string path_text = read_file(path_file);
    const SamplePath path = read_path_csv(path_file);
    const EstimateResult est = estimate_on_path(config, path);

    nlohmann::json j;
    j["estimator"] = estimator_name(est.kind);
    j["horizon_n"] = est.horizon_n;
    nlohmann::json theta;
    for (std::size_t i = 0; i + 1 < est.theta_hat.size(); ++i) {
        theta["mu_hat_" + std::to_string(i + 1)] = est.theta_hat[i];
    }
    theta["alpha_hat"] = est.theta_hat.back();
    j["theta_hat"] = theta;
    j["diagnostics"] = est.diagnostics;
    j["pathwise_surrogate"] = est.pathwise_surrogate;

    const fs::path dir = prepare_out_dir(opts);
    emit_file(dir / "estimate.json", j.dump(2) + "\n", opts);

    nlohmann::json manifest = manifest_base("estimate", config);
    manifest["inputs"] = {{"path", path_file}, {"path_hash", fnv1a_hex(path_text)}};
    manifest["outputs"] = {"estimate.json"};
    emit_file(dir / "manifest.json", manifest.dump(2) + "\n", opts);
}

ExperimentReport dispatch_experiment(ExperimentKind kind, const ExperimentConfig& config) {
    switch (kind) {
        case ExperimentKind::consistency:
            return run_consistency(config);
        case ExperimentKind::rate:
            return run_rate(config);
        case ExperimentKind::limit_dist:
            return run_limit_distribution(config);
        case ExperimentKind::ergodicity:
            return run_ergodicity_check(config);
    }
    throw std::logic_error("dispatch_experiment: invalid kind");
}

void run_montecarlo(const CommonOpts& opts, const std::string& experiment,
                    const std::string& from_manifest) {
    if (!from_manifest.empty() && !opts.config_path.empty()) {
        throw std::invalid_argument("montecarlo takes --config or --from-manifest, not both");
    }
    ExperimentKind kind;
    ExperimentConfig config = [&] {
        if (!from_manifest.empty()) {
            nlohmann::json m;
            try {
                m = nlohmann::json::parse(read_file(from_manifest));
            } catch (const nlohmann::json::exception& e) {
                throw std::invalid_argument(std::string("manifest parse failure: ") + e.what());
            }
            if (!m.contains("experiment") || !m.contains("config")) {
                throw std::invalid_argument(
                    "manifest must carry 'experiment' and 'config' fields");
            }
            kind = parse_experiment(m["experiment"].get<std::string>());
            return config_from_json_text(m["config"].dump());
        }
        if (experiment.empty()) {
            throw std::invalid_argument("montecarlo needs --experiment (or --from-manifest)");
        }
        if (opts.config_path.empty()) {
            throw std::invalid_argument("montecarlo needs --config (or --from-manifest)");
        }
        kind = parse_experiment(experiment);
        return load_config(opts);
    }();

    const ExperimentConfig resolved = resolve_config(config, kind);
    const ExperimentReport report = dispatch_experiment(kind, resolved);

    const fs::path dir = prepare_out_dir(opts);
    emit_file(dir / "replicates.csv", replicates_csv(report), opts);
    emit_file(dir / "summary.json", summary_json_text(resolved, report), opts);

    nlohmann::json manifest = manifest_base("montecarlo", resolved);
    manifest["experiment"] = experiment_name(kind);
    attach_calibration(manifest, resolved,
                       calibration_for(resolved.model.hurst, resolved.points_per_unit));
    manifest["outputs"] = {"replicates.csv", "summary.json"};
    emit_file(dir / "manifest.json", manifest.dump(2) + "\n", opts);
}

void run_classify(const CommonOpts& opts) {
    const ExperimentConfig config = load_config(opts);
    const Classification cls = classify_assumption(config.model.drift);
    if (cls.a1_star) {
        std::cout << "A1*\n";
    } else {
        std::cout << "A1, suggested phi: " << cls.suggested_phi->name() << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "rou_lab: Rosenblatt Ornstein-Uhlenbeck simulation and estimation toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::function<void()> selected;

    auto* calibrate = app.add_subcommand("calibrate", "Calibrate kernel constants to JSON");
    add_common(calibrate, opts, true);
    calibrate->callback([&] { selected = [&] { run_calibrate(opts); }; });

    auto* sim_z = app.add_subcommand("simulate-rosenblatt",
                                     "Simulate a Rosenblatt path to CSV (columns t,z)");
    add_common(sim_z, opts, true);
    sim_z->callback([&] { selected = [&] { run_simulate_rosenblatt(opts); }; });

    auto* sim_x = app.add_subcommand(
        "simulate-rou", "Simulate the Ornstein-Uhlenbeck path to CSV (columns t,x)");
    add_common(sim_x, opts, true);
    sim_x->callback([&] { selected = [&] { run_simulate_rou(opts); }; });

    std::string path_file;
    auto* estimate =
        app.add_subcommand("estimate", "Estimate (mu_1..mu_p, alpha) from a CSV path file");
    add_common(estimate, opts, true);
    estimate->add_option("--path", path_file, "CSV path file (columns t,x)")->required();
    estimate->callback([&] { selected = [&] { run_estimate(opts, path_file); }; });

    std::string experiment, from_manifest;
    auto* montecarlo =
        app.add_subcommand("montecarlo", "Run a replicated experiment to CSV + JSON summary");
    add_common(montecarlo, opts, false);
    montecarlo->add_option("--experiment", experiment,
                           "consistency | rate | limit-dist | ergodicity");
    montecarlo->add_option("--from-manifest", from_manifest,
                           "Re-run the experiment recorded in a manifest JSON");
    montecarlo->callback(
        [&] { selected = [&] { run_montecarlo(opts, experiment, from_manifest); }; });

    auto* classify =
        app.add_subcommand("classify", "Print the basis classification (A1 or A1*)");
    add_common(classify, opts, true);
    classify->callback([&] { selected = [&] { run_classify(opts); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        selected();
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

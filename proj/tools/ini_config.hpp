#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "roulab/montecarlo.hpp"

namespace roulab::cli {

/// Parsed flat key/value config with [model], [grid], [experiment] sections.
/// Unknown sections or keys are rejected so typos fail loudly.
struct IniDocument {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static IniDocument parse_file(const std::filesystem::path& file);
    static IniDocument parse_text(const std::string& text);
};

/// Builds the experiment config, applying the desk-scale defaults
/// (horizons 50,100,200; 500 replicates; 64 points/unit; burn-in 40;
/// estimator lse; base_seed 1) for absent keys. Throws
/// std::invalid_argument with the offending key in the message.
ExperimentConfig config_from_ini(const IniDocument& doc);

}  // namespace roulab::cli

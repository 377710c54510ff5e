#include "ini_config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace roulab::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"model", {"H", "alpha", "basis", "mu"}},
    {"grid", {"points_per_unit"}},
    {"experiment",
     {"horizons", "replicates", "burn_in", "estimator", "base_seed", "phi_extra"}},
};

class ConfigReader {
public:
    explicit ConfigReader(const IniDocument& doc) : doc_(doc) {}

    std::string require(const std::string& section, const std::string& key) const {
        auto value = lookup(section, key);
        if (!value) {
            throw std::invalid_argument("config: missing required key '" + key + "' in [" +
                                        section + "]");
        }
        return *value;
    }

    std::optional<std::string> lookup(const std::string& section, const std::string& key) const {
        auto sec = doc_.sections.find(section);
        if (sec == doc_.sections.end()) return std::nullopt;
        auto it = sec->second.find(key);
        if (it == sec->second.end()) return std::nullopt;
        return it->second;
    }

    double number(const std::string& section, const std::string& key,
                  std::optional<double> fallback = std::nullopt) const {
        auto value = lookup(section, key);
        if (!value) {
            if (fallback) return *fallback;
            return std::stod(require(section, key));  // throws the missing-key message
        }
        return parse_double(*value, section, key);
    }

    long long integer(const std::string& section, const std::string& key,
                      std::optional<long long> fallback = std::nullopt) const {
        auto value = lookup(section, key);
        if (!value) {
            if (fallback) return *fallback;
            require(section, key);
        }
        try {
            std::size_t used = 0;
            const long long v = std::stoll(*value, &used);
            if (used != value->size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + key + "' in [" + section +
                                        "] is not an integer: '" + *value + "'");
        }
    }

private:
    static double parse_double(const std::string& value, const std::string& section,
                               const std::string& key) {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: key '" + key + "' in [" + section +
                                        "] is not a number: '" + value + "'");
        }
    }

    const IniDocument& doc_;
};

}  // namespace

IniDocument IniDocument::parse_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw std::invalid_argument("config: cannot open '" + file.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str());
}

IniDocument IniDocument::parse_text(const std::string& text) {
    IniDocument doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unterminated section header");
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (!kKnownKeys.contains(section)) {
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        if (section.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": key outside any section");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (!kKnownKeys.at(section).contains(key)) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "' in [" + section + "]");
        }
        if (doc.sections[section].contains(key)) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": duplicate key '" + key + "'");
        }
        doc.sections[section][key] = value;
    }
    return doc;
}

ExperimentConfig config_from_ini(const IniDocument& doc) {
    const ConfigReader reader(doc);

    DriftSpec drift;
    for (const std::string& token : split_list(reader.require("model", "basis"))) {
        drift.basis.push_back(TrigBasisFunction::parse(token));
    }
    for (const std::string& token : split_list(reader.require("model", "mu"))) {
        try {
            drift.mu.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw std::invalid_argument("config: mu entry is not a number: '" + token + "'");
        }
    }
    ModelParams model{std::move(drift), reader.number("model", "alpha"),
                      HurstParams(reader.number("model", "H"))};

    std::vector<int> horizons;
    if (auto value = reader.lookup("experiment", "horizons")) {
        for (const std::string& token : split_list(*value)) {
            try {
                horizons.push_back(std::stoi(token));
            } catch (const std::exception&) {
                throw std::invalid_argument("config: horizons entry is not an integer: '" +
                                            token + "'");
            }
        }
    } else {
        horizons = {50, 100, 200};
    }

    ExperimentConfig config{std::move(model),
                            std::move(horizons),
                            static_cast<int>(reader.integer("experiment", "replicates", 500)),
                            static_cast<int>(reader.integer("grid", "points_per_unit", 64)),
                            EstimatorKind::lse,
                            static_cast<std::uint64_t>(
                                reader.integer("experiment", "base_seed", 1)),
                            reader.number("experiment", "burn_in", 40.0)};
    if (auto value = reader.lookup("experiment", "estimator")) {
        config.estimator = parse_estimator(*value);
    }
    if (auto value = reader.lookup("experiment", "phi_extra")) {
        config.phi_extra = TrigBasisFunction::parse(*value);
    }
    return config;
}

}  // namespace roulab::cli

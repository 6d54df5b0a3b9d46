#include "varsel/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "varsel/errors.hpp"

namespace varsel {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
    return value;
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

Setter size_field(std::size_t GaConfig::*f) {
    return [f](RunConfig& c, std::string_view k, std::string_view v) { c.ga.*f = parse_number<std::size_t>(k, v); };
}
Setter size_field(std::size_t TrainConfig::*f) {
    return [f](RunConfig& c, std::string_view k, std::string_view v) { c.train.*f = parse_number<std::size_t>(k, v); };
}
Setter real_field(double GaConfig::*f) {
    return [f](RunConfig& c, std::string_view k, std::string_view v) { c.ga.*f = parse_number<double>(k, v); };
}
Setter real_field(double TrainConfig::*f) {
    return [f](RunConfig& c, std::string_view k, std::string_view v) { c.train.*f = parse_number<double>(k, v); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"n_vars", size_field(&GaConfig::n_vars)},
        {"population_size", size_field(&GaConfig::population_size)},
        {"survival_fraction", real_field(&GaConfig::survival_fraction)},
        {"mutation_rate", real_field(&GaConfig::mutation_rate)},
        {"p_one_parent", real_field(&GaConfig::p_one_parent)},
        {"generations", size_field(&GaConfig::generations)},
        {"master_seed",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             c.ga.master_seed = parse_number<std::uint64_t>(k, v);
         }},
        {"offspring_retry_limit", size_field(&GaConfig::offspring_retry_limit)},
        {"hidden_units", size_field(&TrainConfig::hidden_units)},
        {"max_iterations", size_field(&TrainConfig::max_iterations)},
        {"lambda_init", real_field(&TrainConfig::lambda_init)},
        {"lambda_up", real_field(&TrainConfig::lambda_up)},
        {"lambda_down", real_field(&TrainConfig::lambda_down)},
        {"tol_rel", real_field(&TrainConfig::tol_rel)},
        {"lambda_max", real_field(&TrainConfig::lambda_max)},
        {"data_path", [](RunConfig& c, std::string_view, std::string_view v) { c.data_path = std::string(v); }},
        {"target_column", [](RunConfig& c, std::string_view, std::string_view v) { c.target_column = std::string(v); }},
        {"n_train",
         [](RunConfig& c, std::string_view k, std::string_view v) { c.n_train = parse_number<std::size_t>(k, v); }},
        {"out_dir", [](RunConfig& c, std::string_view, std::string_view v) { c.out_dir = std::string(v); }},
        {"threads",
         [](RunConfig& c, std::string_view k, std::string_view v) { c.threads = parse_number<std::size_t>(k, v); }},
        {"exhaustive_cap",
         [](RunConfig& c, std::string_view k, std::string_view v) {
             c.exhaustive_cap = parse_number<std::size_t>(k, v);
         }},
    };
    return table;
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    it->second(cfg, key, trim(value));
}

RunConfig parse_config(std::istream& in, std::string_view source) {
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        try {
            apply_setting(cfg, trim(text.substr(0, eq)), text.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    RunConfig cfg = parse_config(in, path.string());
    // Relative data paths are resolved against the config file's directory.
    if (!cfg.data_path.empty() && cfg.data_path.is_relative())
        cfg.data_path = path.parent_path() / cfg.data_path;
    return cfg;
}

std::string to_config_text(const RunConfig& cfg) {
    std::ostringstream out;
    const nlohmann::json echo = to_json(cfg);
    for (const auto& [key, value] : echo.items()) {
        out << key << " = ";
        if (value.is_string())
            out << value.get<std::string>();
        else
            out << value.dump();
        out << '\n';
    }
    out << "threads = " << cfg.threads << '\n';
    out << "out_dir = " << cfg.out_dir.string() << '\n';
    return out.str();
}

void validate(const RunConfig& cfg) {
    cfg.train.validate();
    GaConfig ga = cfg.ga;
    // n_vars may still be unresolved; the widest setting skips the
    // population-vs-subset-count check until the data is known.
    if (ga.n_vars == 0) ga.n_vars = kMaxVars;
    ga.validate();
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    if (cfg.n_train < 1) throw ConfigError("n_train must be >= 1");
    if (cfg.target_column.empty()) throw ConfigError("target_column must not be empty");
    if (cfg.data_path.empty()) throw ConfigError("data_path is not set");
    if (!std::filesystem::exists(cfg.data_path))
        throw ConfigError("data file '" + cfg.data_path.string() + "' does not exist");
}

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j = to_json(cfg.ga);
    const nlohmann::json train = to_json(cfg.train);
    for (const auto& [k, v] : train.items())
        if (k != "weight_seed") j[k] = v;
    j["data_path"] = cfg.data_path.string();
    j["target_column"] = cfg.target_column;
    j["n_train"] = cfg.n_train;
    j["exhaustive_cap"] = cfg.exhaustive_cap;
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.ga = ga_config_from_json(j);
    cfg.train = train_config_from_json(j);
    cfg.data_path = j.at("data_path").get<std::string>();
    cfg.target_column = j.at("target_column").get<std::string>();
    cfg.n_train = j.at("n_train").get<std::size_t>();
    cfg.exhaustive_cap = j.at("exhaustive_cap").get<std::size_t>();
    return cfg;
}

}  // namespace varsel

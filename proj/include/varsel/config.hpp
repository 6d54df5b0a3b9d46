#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "varsel/engine.hpp"
#include "varsel/mlp.hpp"

namespace varsel {

/// Everything a run or an exhaustive scan needs.
///
/// The file form is flat `key = value` lines using the field names below
/// (GaConfig and TrainConfig fields plus data_path, target_column, n_train,
/// out_dir, threads, exhaustive_cap). `#` starts a comment. n_vars may be
/// omitted (or 0); it is then taken from the dataset.
struct RunConfig {
    GaConfig ga;
    TrainConfig train;
    std::filesystem::path data_path;
    std::string target_column = "level";
    std::size_t n_train = 200;
    std::filesystem::path out_dir = ".";
    std::size_t threads = 1;
    std::size_t exhaustive_cap = kDefaultExhaustiveCap;
};

/// Sets one field from its textual value. Throws ConfigError on unknown keys
/// or unparsable values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

RunConfig parse_config(std::istream& in, std::string_view source);
RunConfig load_config(const std::filesystem::path& path);
std::string to_config_text(const RunConfig& cfg);

/// Checks numeric ranges and that data_path exists. n_vars is not checked
/// here since it may still be unresolved.
void validate(const RunConfig& cfg);

/// Config echo for summaries. threads and out_dir are left out: neither
/// affects results, and summaries must be identical across both.
nlohmann::json to_json(const RunConfig& cfg);
/// Inverse of to_json; threads and out_dir get their defaults.
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace varsel

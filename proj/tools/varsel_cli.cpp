// varsel: genetic-algorithm variable selection for MLP sensor models.
//
//   varsel run        --config run.cfg [overrides]
//   varsel exhaustive --config run.cfg [overrides]
//   varsel synth      --out data.csv [generator options]
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "varsel/config.hpp"
#include "varsel/data.hpp"
#include "varsel/engine.hpp"
#include "varsel/errors.hpp"
#include "varsel/report.hpp"

namespace fs = std::filesystem;
using namespace varsel;

namespace {

enum ExitCode : int { kOk = 0, kConfig = 1, kData = 2, kRuntime = 3 };

struct Overrides {
    std::string config_path;
    std::vector<std::pair<std::string, std::optional<std::string>>> fields;

    void bind(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
        fields.emplace_back(key, std::nullopt);
        cmd->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { set(key, v); }, help);
    }
    void set(const std::string& key, const std::string& v) {
        for (auto& [k, val] : fields)
            if (k == key) val = v;
    }
};

RunConfig resolve_config(const Overrides& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    for (const auto& [key, value] : o.fields)
        if (value) apply_setting(cfg, key, *value);
    validate(cfg);
    return cfg;
}

SplitDataset load_split(RunConfig& cfg) {
    const Dataset data = load_csv(cfg.data_path, cfg.target_column);
    SplitDataset split = split_sequential(data, cfg.n_train);
    for (std::size_t c : split.constant_columns)
        std::cerr << "warning: column '" << split.train.var_names[c]
                  << "' is constant on the training rows; using unit scale\n";
    if (cfg.ga.n_vars == 0) cfg.ga.n_vars = split.n_vars();
    if (cfg.ga.n_vars != split.n_vars())
        throw ConfigError("n_vars = " + std::to_string(cfg.ga.n_vars) + " but the dataset has " +
                          std::to_string(split.n_vars()) + " sensor columns");
    return split;
}

int cmd_run(Overrides& o) {
    RunConfig cfg = resolve_config(o);
    const SplitDataset split = load_split(cfg);
    cfg.ga.validate();
    fs::create_directories(cfg.out_dir);

    GenerationLog log(cfg.out_dir / kGenerationsFile);
    const RunResult result = run(cfg.ga, split, cfg.train, cfg.threads,
                                 [&](const GenerationReport& r) { log.append(r); });

    write_graveyard_jsonl(result.graveyard, cfg.out_dir / kGraveyardFile);
    write_json(make_summary(cfg, result, split.train.var_names), cfg.out_dir / kSummaryFile);
    write_json({{"wall_seconds", result.wall_seconds},
                {"threads", cfg.threads},
                {"generation_seconds", log.elapsed()}},
               cfg.out_dir / kTimingFile);

    std::cout << "best " << to_hyphen_string(result.best.chromosome)
              << " cv_sse=" << nlohmann::json(result.best.score.cv_sse).dump()
              << " evaluations=" << result.graveyard.size()
              << (result.exhausted ? " (search space exhausted)" : "") << '\n';
    return kOk;
}

int cmd_exhaustive(Overrides& o) {
    RunConfig cfg = resolve_config(o);
    const SplitDataset split = load_split(cfg);
    fs::create_directories(cfg.out_dir);

    const ExhaustiveResult r = exhaustive_search(cfg.ga.n_vars, split, cfg.train, cfg.ga.master_seed,
                                                 cfg.exhaustive_cap, cfg.threads);
    write_scores_csv(r, cfg.out_dir / kScoresFile);
    std::cout << "winner " << to_hyphen_string(r.best.chromosome)
              << " cv_sse=" << nlohmann::json(r.best.score.cv_sse).dump()
              << " subsets=" << r.table.size() << '\n';
    return kOk;
}

struct SynthArgs {
    std::size_t n_vars = 20;
    std::size_t n_samples = 400;
    std::string informative = "2-5-9-14";
    double noise_sd = 0.1;
    std::uint64_t seed = 1;
    std::string out = "lfcm_synth.csv";
};

int cmd_synth(const SynthArgs& a) {
    const Chromosome informative = [&] {
        try {
            return parse_hyphen_string(a.informative);
        } catch (const Error& e) {
            throw ConfigError(std::string("--informative: ") + e.what());
        }
    }();
    if (informative.max_gene() >= a.n_vars)
        throw ConfigError("--informative lists variable " + std::to_string(informative.max_gene() + 1) +
                          " but --n-vars is " + std::to_string(a.n_vars));
    const Dataset d = synth_lfcm(a.n_vars, a.n_samples, informative, a.noise_sd, a.seed);
    const fs::path out(a.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_csv(d, out, "level");
    write_json({{"n_vars", a.n_vars},
                {"n_samples", a.n_samples},
                {"informative", to_json(informative)},
                {"noise_sd", a.noise_sd},
                {"seed", a.seed},
                {"target_column", "level"}},
               fs::path(a.out + ".meta.json"));
    std::cout << "wrote " << a.out << " (" << a.n_samples << " rows, " << a.n_vars
              << " sensors, informative " << to_hyphen_string(informative) << ")\n";
    return kOk;
}

void add_search_flags(CLI::App* cmd, Overrides& o, bool ga_flags) {
    cmd->add_option("--config", o.config_path, "key = value config file");
    o.bind(cmd, "--seed", "master_seed", "master seed for all randomness");
    o.bind(cmd, "--hidden-units", "hidden_units", "hidden units per network");
    o.bind(cmd, "--threads", "threads", "parallel evaluations (results do not depend on it)");
    o.bind(cmd, "--out-dir", "out_dir", "directory for output files");
    o.bind(cmd, "--data", "data_path", "CSV dataset");
    o.bind(cmd, "--target", "target_column", "target column name");
    o.bind(cmd, "--n-train", "n_train", "leading rows used for training");
    if (ga_flags) {
        o.bind(cmd, "--population", "population_size", "population size");
        o.bind(cmd, "--survival", "survival_fraction", "fraction of the population kept each generation");
        o.bind(cmd, "--mutation-rate", "mutation_rate", "per-position flip probability");
        o.bind(cmd, "--generations", "generations", "number of generations");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GA-driven input variable selection for MLP models"};
    app.require_subcommand(1);

    Overrides run_opts;
    auto* run_cmd = app.add_subcommand("run", "run the genetic search");
    add_search_flags(run_cmd, run_opts, true);

    Overrides exh_opts;
    auto* exh_cmd = app.add_subcommand("exhaustive", "score every nonempty subset (small n_vars only)");
    add_search_flags(exh_cmd, exh_opts, false);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic melter-style dataset");
    synth_cmd->add_option("--n-vars", synth.n_vars, "sensor columns")->capture_default_str();
    synth_cmd->add_option("--n-samples", synth.n_samples, "rows")->capture_default_str();
    synth_cmd->add_option("--informative", synth.informative, "1-based informative sensors, e.g. 1-4-7")
        ->capture_default_str();
    synth_cmd->add_option("--noise-sd", synth.noise_sd, "noise on informative sensors")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "generator seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "output CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }

    try {
        if (*run_cmd) return cmd_run(run_opts);
        if (*exh_cmd) return cmd_exhaustive(exh_opts);
        if (*synth_cmd) return cmd_synth(synth);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return kRuntime;
    }
    return kRuntime;
}

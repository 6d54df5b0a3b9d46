#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "varsel/data.hpp"
#include "varsel/fitness.hpp"
#include "varsel/genome.hpp"
#include "varsel/mlp.hpp"
#include "varsel/rng.hpp"

namespace varsel {

struct GaConfig {
    std::size_t n_vars = 0;
    std::size_t population_size = 50;
    double survival_fraction = 0.20;
    double mutation_rate = 0.1;
    double p_one_parent = 0.5;
    std::size_t generations = 25;
    std::uint64_t master_seed = 1;
    std::size_t offspring_retry_limit = 200;

    /// ceil(survival_fraction * population_size)
    std::size_t survivor_count() const noexcept;
    /// Throws ConfigError when a field violates its range.
    void validate() const;

    friend bool operator==(const GaConfig&, const GaConfig&) = default;
};

struct GenerationReport {
    std::size_t generation = 0;
    Member best;
    /// Mean over members with a finite score; +inf when there are none.
    double mean_cv_sse = 0.0;
    std::size_t new_evaluations = 0;
    std::size_t graveyard_size = 0;
    std::size_t population_size = 0;
    /// Offspring drawn uniformly at random because crossover kept repeating.
    std::size_t random_fallbacks = 0;
    /// The search space ran out of unburied chromosomes during this generation.
    bool exhausted = false;
    double elapsed_seconds = 0.0;
};

/// Number of nonempty subsets of n_vars variables, 2^n - 1.
std::uint64_t subset_count(std::size_t n_vars);

/// All singletons, the full set, then distinct random fillers whose sizes are
/// drawn uniformly from {2, ..., n_vars - 1}. When the population cannot hold
/// every singleton plus the full set, singletons are taken in index order and
/// the full set takes the last slot.
std::vector<Chromosome> init_population(const GaConfig& cfg);

/// Two distinct members drawn uniformly from the survivors.
std::pair<Chromosome, Chromosome> select_parents(std::span<const Member> survivors, Rng& rng);

/// Crossover plus mutation until the child is neither buried nor pending; then
/// uniformly random unburied chromosomes. Adds the child's key to `pending`.
/// Throws ExhaustedNovelty when no novel chromosome can be found.
Chromosome produce_offspring(std::span<const Member> survivors, const Graveyard& graveyard,
                             std::unordered_set<GeneKey>& pending, const GaConfig& cfg, Rng& rng,
                             bool* used_fallback = nullptr);

/// Scores a batch on `threads` workers. Output order matches input order and
/// does not depend on the thread count.
std::vector<Score> evaluate_batch(std::span<const Chromosome> batch, const SplitDataset& split,
                                  const TrainConfig& cfg, std::uint64_t master_seed,
                                  std::size_t threads);

/// The generational loop. Construction evaluates the initial population
/// (generation 0); each step() produces one further generation.
class GaEngine {
public:
    GaEngine(GaConfig cfg, const SplitDataset& split, TrainConfig train_cfg, std::size_t threads = 1);

    const GenerationReport& initial_report() const noexcept { return *initial_; }
    GenerationReport step();

    bool exhausted() const noexcept { return exhausted_; }
    std::size_t generation() const noexcept { return generation_; }
    const std::vector<Member>& population() const noexcept { return population_; }
    const Graveyard& graveyard() const noexcept { return graveyard_; }
    Graveyard release_graveyard() { return std::move(graveyard_); }
    const GaConfig& config() const noexcept { return cfg_; }

private:
    GenerationReport make_report(std::size_t new_evals, std::size_t fallbacks, double elapsed) const;

    GaConfig cfg_;
    const SplitDataset& split_;
    TrainConfig train_cfg_;
    std::size_t threads_;
    Rng rng_;
    Graveyard graveyard_;
    std::vector<Member> population_;
    std::size_t generation_ = 0;
    bool exhausted_ = false;
    std::optional<GenerationReport> initial_;
};

struct RunResult {
    Member best;
    GenerationReport initial;
    /// Generations 1..G (fewer when the search space ran out).
    std::vector<GenerationReport> reports;
    Graveyard graveyard;
    bool exhausted = false;
    double wall_seconds = 0.0;
};

using ReportSink = std::function<void(const GenerationReport&)>;

/// Full search. `sink` sees generation 0 and then every later generation.
RunResult run(const GaConfig& cfg, const SplitDataset& split, const TrainConfig& train_cfg,
              std::size_t threads = 1, const ReportSink& sink = {});

inline constexpr std::size_t kDefaultExhaustiveCap = 14;

struct ExhaustiveResult {
    Member best;
    /// Every nonempty subset, ordered by bitmask value.
    std::vector<Member> table;
};

/// Scores every nonempty subset with the same evaluate() and seed derivation
/// as the GA. Throws CapExceeded when n_vars > cap.
ExhaustiveResult exhaustive_search(std::size_t n_vars, const SplitDataset& split,
                                   const TrainConfig& train_cfg, std::uint64_t master_seed,
                                   std::size_t cap = kDefaultExhaustiveCap, std::size_t threads = 1);

nlohmann::json to_json(const GaConfig& cfg);
GaConfig ga_config_from_json(const nlohmann::json& j);
/// One generations.jsonl line. Timing is deliberately absent.
nlohmann::json to_json(const GenerationReport& r);

}  // namespace varsel

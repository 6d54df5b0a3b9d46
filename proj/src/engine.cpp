#include "varsel/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "varsel/errors.hpp"

namespace varsel {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Largest n_vars for which the free chromosomes are enumerated outright.
constexpr std::size_t kEnumerableVars = 20;

std::uint64_t all_bits(std::size_t n_vars) {
    return n_vars >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_vars) - 1;
}

GeneKey random_key(std::size_t n_vars, Rng& rng) {
    if (n_vars >= 64) {
        std::uint64_t v;
        do {
            v = rng.next();
        } while (v == 0);
        return {v};
    }
    return {1 + rng.below(all_bits(n_vars))};
}

Chromosome random_subset_of_size(std::size_t n_vars, std::size_t k, Rng& rng) {
    std::vector<Gene> pool(n_vars);
    for (std::size_t i = 0; i < n_vars; ++i) pool[i] = static_cast<Gene>(i);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n_vars - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return Chromosome::from_genes(std::move(pool));
}

template <typename IsFree>
std::optional<GeneKey> pick_free_by_enumeration(std::size_t n_vars, IsFree&& is_free, Rng& rng) {
    std::vector<std::uint64_t> free;
    for (std::uint64_t m = 1; m <= all_bits(n_vars); ++m)
        if (is_free(GeneKey{m})) free.push_back(m);
    if (free.empty()) return std::nullopt;
    return GeneKey{free[rng.below(free.size())]};
}

void sort_population(std::vector<Member>& pop) {
    std::sort(pop.begin(), pop.end(), ranks_before);
}

}  // namespace

std::size_t GaConfig::survivor_count() const noexcept {
    // Round before ceil so 0.2 * 30 stays 6 despite binary representation.
    const double raw = survival_fraction * static_cast<double>(population_size);
    return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

void GaConfig::validate() const {
    if (n_vars < 1 || n_vars > kMaxVars)
        throw ConfigError("n_vars must lie in [1, " + std::to_string(kMaxVars) + "], got " +
                          std::to_string(n_vars));
    if (population_size < 4) throw ConfigError("population_size must be >= 4");
    if (!(survival_fraction > 0.0 && survival_fraction < 1.0))
        throw ConfigError("survival_fraction must lie in (0, 1)");
    if (survivor_count() < 2)
        throw ConfigError("survival_fraction * population_size must leave at least 2 survivors");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        throw ConfigError("mutation_rate must lie in [0, 1]");
    if (!(p_one_parent >= 0.0 && p_one_parent <= 1.0))
        throw ConfigError("p_one_parent must lie in [0, 1]");
    if (generations < 1) throw ConfigError("generations must be >= 1");
    if (offspring_retry_limit < 1) throw ConfigError("offspring_retry_limit must be >= 1");
    if (n_vars < 64 && population_size > subset_count(n_vars))
        throw ConfigError("population_size " + std::to_string(population_size) + " exceeds the " +
                          std::to_string(subset_count(n_vars)) + " distinct chromosomes over " +
                          std::to_string(n_vars) + " variables");
}

std::uint64_t subset_count(std::size_t n_vars) {
    if (n_vars >= 64) throw ConfigError("subset count overflows for n_vars >= 64");
    return (std::uint64_t{1} << n_vars) - 1;
}

std::vector<Chromosome> init_population(const GaConfig& cfg) {
    if (cfg.population_size < 2) throw ConfigError("population_size must be >= 2");
    const std::size_t n = cfg.n_vars;
    const std::size_t size = cfg.population_size;
    if (n < 1 || n > kMaxVars) throw ConfigError("n_vars must lie in [1, 64]");
    if (n < 64 && size > subset_count(n))
        throw ConfigError("population_size exceeds the number of distinct chromosomes");

    std::vector<Chromosome> pop;
    pop.reserve(size);
    if (size < n + 1) {
        for (std::size_t i = 0; i + 1 < size; ++i) pop.push_back(Chromosome::from_genes({static_cast<Gene>(i)}));
        pop.push_back(Chromosome::full(n));
        return pop;
    }

    std::unordered_set<GeneKey> seen;
    for (std::size_t i = 0; i < n; ++i) {
        pop.push_back(Chromosome::from_genes({static_cast<Gene>(i)}));
        seen.insert(canonical_key(pop.back()));
    }
    if (seen.insert(canonical_key(Chromosome::full(n))).second) pop.push_back(Chromosome::full(n));

    Rng rng(derive_seed(cfg.master_seed, "init"));
    std::size_t misses = 0;
    while (pop.size() < size) {
        if (n >= 3 && misses < cfg.offspring_retry_limit) {
            const std::size_t k = 2 + static_cast<std::size_t>(rng.below(n - 2));
            Chromosome c = random_subset_of_size(n, k, rng);
            if (seen.insert(canonical_key(c)).second) {
                pop.push_back(std::move(c));
                misses = 0;
            } else {
                ++misses;
            }
            continue;
        }
        // Mid-sized subsets are used up; take any unused chromosome.
        std::optional<GeneKey> key;
        if (n <= kEnumerableVars) {
            key = pick_free_by_enumeration(n, [&](GeneKey k) { return !seen.contains(k); }, rng);
        } else {
            do {
                key = random_key(n, rng);
            } while (seen.contains(*key));
        }
        if (!key) throw ConfigError("population_size exceeds the number of distinct chromosomes");
        seen.insert(*key);
        pop.push_back(from_key(*key));
    }
    return pop;
}

std::pair<Chromosome, Chromosome> select_parents(std::span<const Member> survivors, Rng& rng) {
    if (survivors.size() < 2)
        throw TooFewSurvivors("parent selection needs at least 2 survivors, have " +
                              std::to_string(survivors.size()));
    const std::uint64_t n = survivors.size();
    const std::uint64_t i = rng.below(n);
    std::uint64_t j = rng.below(n - 1);
    if (j >= i) ++j;
    return {survivors[i].chromosome, survivors[j].chromosome};
}

Chromosome produce_offspring(std::span<const Member> survivors, const Graveyard& graveyard,
                             std::unordered_set<GeneKey>& pending, const GaConfig& cfg, Rng& rng,
                             bool* used_fallback) {
    const auto is_free = [&](GeneKey k) { return !graveyard.contains(k) && !pending.contains(k); };
    if (used_fallback) *used_fallback = false;

    for (std::size_t attempt = 0; attempt < cfg.offspring_retry_limit; ++attempt) {
        auto [a, b] = select_parents(survivors, rng);
        auto child = try_uniform_crossover(a, b, cfg.p_one_parent, rng);
        if (!child) continue;
        Chromosome mutated = mutate(*child, cfg.mutation_rate, cfg.n_vars, rng);
        const GeneKey key = canonical_key(mutated);
        if (!is_free(key)) continue;
        pending.insert(key);
        return mutated;
    }

    if (used_fallback) *used_fallback = true;
    for (std::size_t attempt = 0; attempt < cfg.offspring_retry_limit; ++attempt) {
        const GeneKey key = random_key(cfg.n_vars, rng);
        if (!is_free(key)) continue;
        pending.insert(key);
        return from_key(key);
    }
    if (cfg.n_vars <= kEnumerableVars) {
        if (auto key = pick_free_by_enumeration(cfg.n_vars, is_free, rng)) {
            pending.insert(*key);
            return from_key(*key);
        }
    }
    throw ExhaustedNovelty("no unburied chromosome found after " +
                           std::to_string(2 * cfg.offspring_retry_limit) + " attempts");
}

std::vector<Score> evaluate_batch(std::span<const Chromosome> batch, const SplitDataset& split,
                                  const TrainConfig& cfg, std::uint64_t master_seed,
                                  std::size_t threads) {
    std::vector<std::optional<Score>> results(batch.size());
    std::vector<std::exception_ptr> errors(batch.size());
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < batch.size(); i = next.fetch_add(1)) {
            try {
                results[i] = evaluate(batch[i], split, cfg, master_seed);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), batch.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    }

    std::vector<Score> out;
    out.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(*results[i]);
    }
    return out;
}

GaEngine::GaEngine(GaConfig cfg, const SplitDataset& split, TrainConfig train_cfg, std::size_t threads)
    : cfg_(cfg),
      split_(split),
      train_cfg_(train_cfg),
      threads_(std::max<std::size_t>(threads, 1)),
      rng_(derive_seed(cfg.master_seed, "engine")) {
    cfg_.validate();
    train_cfg_.validate();
    if (split.n_vars() != cfg_.n_vars)
        throw ConfigError("dataset has " + std::to_string(split.n_vars()) +
                          " variables but n_vars is " + std::to_string(cfg_.n_vars));

    const auto t0 = Clock::now();
    const std::vector<Chromosome> initial = init_population(cfg_);
    const std::vector<Score> scores = evaluate_batch(initial, split_, train_cfg_, cfg_.master_seed, threads_);
    for (std::size_t i = 0; i < initial.size(); ++i) {
        graveyard_.bury(initial[i], scores[i], 0);
        population_.push_back({initial[i], scores[i]});
    }
    sort_population(population_);
    initial_ = make_report(initial.size(), 0, seconds_since(t0));
}

GenerationReport GaEngine::make_report(std::size_t new_evals, std::size_t fallbacks,
                                       double elapsed) const {
    double sum = 0.0;
    std::size_t finite = 0;
    for (const auto& m : population_) {
        if (std::isfinite(m.score.cv_sse)) {
            sum += m.score.cv_sse;
            ++finite;
        }
    }
    return GenerationReport{
        .generation = generation_,
        .best = population_.front(),
        .mean_cv_sse = finite > 0 ? sum / static_cast<double>(finite)
                                  : std::numeric_limits<double>::infinity(),
        .new_evaluations = new_evals,
        .graveyard_size = graveyard_.size(),
        .population_size = population_.size(),
        .random_fallbacks = fallbacks,
        .exhausted = exhausted_,
        .elapsed_seconds = elapsed,
    };
}

GenerationReport GaEngine::step() {
    if (exhausted_) throw ExhaustedNovelty("search space already exhausted");
    const auto t0 = Clock::now();
    ++generation_;

    const std::size_t keep = std::min(cfg_.survivor_count(), population_.size());
    population_.erase(population_.begin() + static_cast<std::ptrdiff_t>(keep), population_.end());
    const std::span<const Member> survivors(population_);

    std::vector<Chromosome> offspring;
    std::unordered_set<GeneKey> pending;
    std::size_t fallbacks = 0;
    while (keep + offspring.size() < cfg_.population_size) {
        try {
            bool fallback = false;
            offspring.push_back(produce_offspring(survivors, graveyard_, pending, cfg_, rng_, &fallback));
            fallbacks += fallback ? 1 : 0;
        } catch (const ExhaustedNovelty&) {
            exhausted_ = true;
            break;
        }
    }

    const std::vector<Score> scores = evaluate_batch(offspring, split_, train_cfg_, cfg_.master_seed, threads_);
    for (std::size_t i = 0; i < offspring.size(); ++i) {
        graveyard_.bury(offspring[i], scores[i], generation_);
        population_.push_back({offspring[i], scores[i]});
    }
    sort_population(population_);
    return make_report(offspring.size(), fallbacks, seconds_since(t0));
}

RunResult run(const GaConfig& cfg, const SplitDataset& split, const TrainConfig& train_cfg,
              std::size_t threads, const ReportSink& sink) {
    const auto t0 = Clock::now();
    GaEngine engine(cfg, split, train_cfg, threads);
    if (sink) sink(engine.initial_report());

    std::vector<GenerationReport> reports;
    while (engine.generation() < cfg.generations && !engine.exhausted()) {
        reports.push_back(engine.step());
        if (sink) sink(reports.back());
    }

    // Survivors are never dropped, so the population head is the global best.
    return RunResult{
        .best = engine.population().front(),
        .initial = engine.initial_report(),
        .reports = std::move(reports),
        .graveyard = engine.release_graveyard(),
        .exhausted = engine.exhausted(),
        .wall_seconds = seconds_since(t0),
    };
}

ExhaustiveResult exhaustive_search(std::size_t n_vars, const SplitDataset& split,
                                   const TrainConfig& train_cfg, std::uint64_t master_seed,
                                   std::size_t cap, std::size_t threads) {
    if (n_vars > cap)
        throw CapExceeded("exhaustive search over " + std::to_string(n_vars) +
                          " variables exceeds the cap of " + std::to_string(cap));
    if (n_vars < 1) throw ConfigError("exhaustive search needs at least one variable");
    if (split.n_vars() != n_vars)
        throw ConfigError("dataset has " + std::to_string(split.n_vars()) +
                          " variables but n_vars is " + std::to_string(n_vars));
    train_cfg.validate();

    std::vector<Chromosome> all;
    all.reserve(subset_count(n_vars));
    for (std::uint64_t m = 1; m <= subset_count(n_vars); ++m) all.push_back(from_key(GeneKey{m}));
    const std::vector<Score> scores = evaluate_batch(all, split, train_cfg, master_seed, threads);

    std::vector<Member> table;
    table.reserve(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) table.push_back({all[i], scores[i]});
    const Member best = *std::min_element(table.begin(), table.end(), ranks_before);
    return ExhaustiveResult{best, std::move(table)};
}

nlohmann::json to_json(const GaConfig& cfg) {
    return {
        {"n_vars", cfg.n_vars},
        {"population_size", cfg.population_size},
        {"survival_fraction", cfg.survival_fraction},
        {"mutation_rate", cfg.mutation_rate},
        {"p_one_parent", cfg.p_one_parent},
        {"generations", cfg.generations},
        {"master_seed", cfg.master_seed},
        {"offspring_retry_limit", cfg.offspring_retry_limit},
    };
}

GaConfig ga_config_from_json(const nlohmann::json& j) {
    GaConfig cfg;
    cfg.n_vars = j.at("n_vars").get<std::size_t>();
    cfg.population_size = j.at("population_size").get<std::size_t>();
    cfg.survival_fraction = j.at("survival_fraction").get<double>();
    cfg.mutation_rate = j.at("mutation_rate").get<double>();
    cfg.p_one_parent = j.at("p_one_parent").get<double>();
    cfg.generations = j.at("generations").get<std::size_t>();
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    cfg.offspring_retry_limit = j.at("offspring_retry_limit").get<std::size_t>();
    return cfg;
}

nlohmann::json to_json(const GenerationReport& r) {
    return {
        {"generation", r.generation},
        {"best_genes", to_json(r.best.chromosome)},
        {"best_cv_sse", finite_or_null(r.best.score.cv_sse)},
        {"mean_cv_sse", finite_or_null(r.mean_cv_sse)},
        {"new_evaluations", r.new_evaluations},
        {"graveyard_size", r.graveyard_size},
        {"population_size", r.population_size},
        {"random_fallbacks", r.random_fallbacks},
        {"exhausted", r.exhausted},
    };
}

}  // namespace varsel

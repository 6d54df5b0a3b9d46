#include "varsel/fitness.hpp"

#include <cmath>
#include <limits>

#include "varsel/errors.hpp"
#include "varsel/rng.hpp"

namespace varsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Score failed_score(std::size_t gene_count, std::size_t iterations) {
    Score s;
    s.cv_sse = kInf;
    s.train_sse = kInf;
    s.gene_count = gene_count;
    s.iterations_used = iterations;
    s.failed = true;
    return s;
}

double sse_from_json(const nlohmann::json& j) {
    return j.is_null() ? kInf : j.get<double>();
}

}  // namespace

bool ranks_before(const Member& a, const Member& b) noexcept {
    // operator< on doubles already places +inf after every finite value.
    if (a.score.cv_sse != b.score.cv_sse) return a.score.cv_sse < b.score.cv_sse;
    if (a.chromosome.size() != b.chromosome.size()) return a.chromosome.size() < b.chromosome.size();
    return a.chromosome < b.chromosome;
}

std::uint64_t weight_seed_for(std::uint64_t master_seed, GeneKey key) noexcept {
    return derive_seed(derive_seed(master_seed, "weights"), key.bits);
}

Score evaluate(const Chromosome& c, const SplitDataset& split, const TrainConfig& cfg,
               std::uint64_t master_seed) {
    const NormStats stats = select_columns(split.norm_stats, c);
    const Dataset train = normalize_apply(select_columns(split.train, c), stats);
    const Dataset cv = normalize_apply(select_columns(split.cv, c), stats);

    TrainConfig seeded = cfg;
    seeded.weight_seed = weight_seed_for(master_seed, canonical_key(c));

    TrainedModel model;
    try {
        model = train_lm(train.samples, train.target, seeded);
    } catch (const SolveFailure&) {
        return failed_score(c.size(), 0);
    }
    const double cv_sse = sse(model.params, cv.samples, cv.target);
    if (!std::isfinite(cv_sse) || !std::isfinite(model.train_sse))
        return failed_score(c.size(), model.iterations_used);

    Score s;
    s.cv_sse = cv_sse;
    s.train_sse = model.train_sse;
    s.gene_count = c.size();
    s.iterations_used = model.iterations_used;
    s.converged = model.converged;
    return s;
}

const Score* Graveyard::find(GeneKey key) const {
    const auto it = scores_.find(key);
    return it == scores_.end() ? nullptr : &it->second;
}

void Graveyard::bury(const Chromosome& c, const Score& s, std::size_t generation) {
    if (!scores_.emplace(canonical_key(c), s).second)
        throw Error("chromosome " + to_hyphen_string(c) + " is already buried");
    audit_.push_back({c, s, generation, false});
}

void Graveyard::note_hit(const Chromosome& c, const Score& s, std::size_t generation) {
    audit_.push_back({c, s, generation, true});
}

Graveyard Graveyard::replay(const std::vector<AuditRecord>& log) {
    Graveyard g;
    for (const auto& r : log)
        if (!r.was_cached) g.bury(r.chromosome, r.score, r.generation);
    return g;
}

bool Graveyard::same_entries(const Graveyard& other) const { return scores_ == other.scores_; }

bool is_buried(const Chromosome& c, const Graveyard& g) { return g.contains(canonical_key(c)); }

Lookup lookup_or_evaluate(const Chromosome& c, Graveyard& g, const SplitDataset& split,
                          const TrainConfig& cfg, std::uint64_t master_seed,
                          std::size_t generation) {
    if (const Score* s = g.find(canonical_key(c))) {
        g.note_hit(c, *s, generation);
        return {*s, true};
    }
    Score s = evaluate(c, split, cfg, master_seed);
    g.bury(c, s, generation);
    return {s, false};
}

nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const AuditRecord& r) {
    return {
        {"generation", r.generation},
        {"genes", to_json(r.chromosome)},
        {"cv_sse", finite_or_null(r.score.cv_sse)},
        {"train_sse", finite_or_null(r.score.train_sse)},
        {"gene_count", r.score.gene_count},
        {"iterations", r.score.iterations_used},
        {"converged", r.score.converged},
        {"failed", r.score.failed},
        {"was_cached", r.was_cached},
    };
}

AuditRecord audit_record_from_json(const nlohmann::json& j) {
    AuditRecord r{chromosome_from_json(j.at("genes")), {}, 0, false};
    r.generation = j.at("generation").get<std::size_t>();
    r.score.cv_sse = sse_from_json(j.at("cv_sse"));
    r.score.train_sse = sse_from_json(j.at("train_sse"));
    r.score.gene_count = j.at("gene_count").get<std::size_t>();
    r.score.iterations_used = j.at("iterations").get<std::size_t>();
    r.score.converged = j.at("converged").get<bool>();
    r.score.failed = j.at("failed").get<bool>();
    r.was_cached = j.at("was_cached").get<bool>();
    return r;
}

}  // namespace varsel

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "varsel/data.hpp"
#include "varsel/genome.hpp"
#include "varsel/mlp.hpp"

namespace varsel {

struct Score {
    double cv_sse = 0.0;
    double train_sse = 0.0;
    std::size_t gene_count = 0;
    std::size_t iterations_used = 0;
    bool converged = false;
    /// Training raised SolveFailure (or produced a non-finite score); both
    /// SSE fields are +infinity so the chromosome ranks last.
    bool failed = false;

    friend bool operator==(const Score&, const Score&) = default;
};

struct Member {
    Chromosome chromosome;
    Score score;
};

/// Total order used for ranking: lower cv_sse first (infinite last), then
/// fewer genes, then lexicographic gene order.
bool ranks_before(const Member& a, const Member& b) noexcept;

/// Seed of the network weights for a chromosome; fixed by (master_seed, genes).
std::uint64_t weight_seed_for(std::uint64_t master_seed, GeneKey key) noexcept;

/// select columns -> normalize with train stats -> train_lm -> cv SSE.
/// A pure function of its arguments.
Score evaluate(const Chromosome& c, const SplitDataset& split, const TrainConfig& cfg,
               std::uint64_t master_seed);

struct AuditRecord {
    Chromosome chromosome;
    Score score;
    std::size_t generation = 0;
    bool was_cached = false;
};

/// Every chromosome ever scored in a run. Append-only; not thread-safe, the
/// engine serializes access and only dispatches training in parallel.
class Graveyard {
public:
    bool contains(GeneKey key) const { return scores_.contains(key); }
    const Score* find(GeneKey key) const;

    /// Throws Error when the key is already present.
    void bury(const Chromosome& c, const Score& s, std::size_t generation);
    /// Logs a cache hit in the audit trail; the map is unchanged.
    void note_hit(const Chromosome& c, const Score& s, std::size_t generation);

    std::size_t size() const noexcept { return scores_.size(); }
    /// All evaluations and cache hits in the order they happened.
    const std::vector<AuditRecord>& audit() const noexcept { return audit_; }

    /// Rebuilds a graveyard from an audit log (cache hits are skipped).
    static Graveyard replay(const std::vector<AuditRecord>& log);

    bool same_entries(const Graveyard& other) const;

private:
    std::unordered_map<GeneKey, Score> scores_;
    std::vector<AuditRecord> audit_;
};

bool is_buried(const Chromosome& c, const Graveyard& g);

struct Lookup {
    Score score;
    bool was_cached = false;
};

/// Returns the stored score without training when c is buried; otherwise
/// evaluates, buries and returns it.
Lookup lookup_or_evaluate(const Chromosome& c, Graveyard& g, const SplitDataset& split,
                          const TrainConfig& cfg, std::uint64_t master_seed,
                          std::size_t generation = 0);

/// One JSON-lines audit record. Non-finite SSEs are written as null.
nlohmann::json to_json(const AuditRecord& r);
AuditRecord audit_record_from_json(const nlohmann::json& j);

/// JSON number, or null for non-finite values.
nlohmann::json finite_or_null(double v);

}  // namespace varsel

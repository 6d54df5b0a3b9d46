#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "varsel/rng.hpp"

namespace varsel {

using Gene = std::uint32_t;

/// Upper bound on the number of candidate variables. Keys are 64-bit masks.
inline constexpr std::size_t kMaxVars = 64;

/// One flag per candidate variable.
using Bitmask = std::vector<bool>;

/// Canonical identity of a gene set: bit i set iff gene i is expressed.
struct GeneKey {
    std::uint64_t bits = 0;

    friend auto operator<=>(const GeneKey&, const GeneKey&) = default;
};

/// A nonempty, strictly increasing set of 0-based variable indices.
class Chromosome {
public:
    /// Sorts the genes. Throws EmptyChromosome on an empty list,
    /// IndexOutOfRange for genes >= kMaxVars and Error on duplicates.
    static Chromosome from_genes(std::vector<Gene> genes);

    /// All genes in [0, n_vars).
    static Chromosome full(std::size_t n_vars);

    const std::vector<Gene>& genes() const noexcept { return genes_; }
    std::size_t size() const noexcept { return genes_.size(); }
    Gene max_gene() const noexcept { return genes_.back(); }
    bool contains(Gene g) const noexcept;

    friend bool operator==(const Chromosome&, const Chromosome&) = default;
    /// Lexicographic on the sorted gene list.
    friend std::strong_ordering operator<=>(const Chromosome& a, const Chromosome& b) {
        return a.genes_ <=> b.genes_;
    }

private:
    explicit Chromosome(std::vector<Gene> genes) : genes_(std::move(genes)) {}

    std::vector<Gene> genes_;
};

Chromosome from_bitmask(const Bitmask& bits);
Bitmask to_bitmask(const Chromosome& c, std::size_t n_vars);

GeneKey canonical_key(const Chromosome& c) noexcept;
/// Inverse of canonical_key. Throws EmptyChromosome for a zero key.
Chromosome from_key(GeneKey key);

/// Genes present in both parents are kept; genes present in exactly one are
/// kept independently with probability p_one_parent. Draws are consumed in
/// ascending gene order, so swapping the parents does not change the result.
/// Throws EmptyChromosome when nothing is kept.
Chromosome uniform_crossover(const Chromosome& a, const Chromosome& b, double p_one_parent,
                             Rng& rng);

/// As uniform_crossover but returns nullopt instead of throwing.
std::optional<Chromosome> try_uniform_crossover(const Chromosome& a, const Chromosome& b,
                                                double p_one_parent, Rng& rng);

inline constexpr int kMutationRetries = 32;

/// Flips each of the n_vars positions independently with probability `rate`.
/// An empty result is redrawn up to kMutationRetries times; after that the
/// input is returned unchanged.
Chromosome mutate(const Chromosome& c, double rate, std::size_t n_vars, Rng& rng);

/// "1-2-5" style rendering, 1-based.
std::string to_hyphen_string(const Chromosome& c);
/// Parses the 1-based hyphen form. Throws ParseError on malformed input.
Chromosome parse_hyphen_string(std::string_view text);

/// JSON array of 1-based indices.
nlohmann::json to_json(const Chromosome& c);
Chromosome chromosome_from_json(const nlohmann::json& j);

}  // namespace varsel

template <>
struct std::hash<varsel::GeneKey> {
    std::size_t operator()(const varsel::GeneKey& k) const noexcept {
        return std::hash<std::uint64_t>{}(varsel::mix64(k.bits));
    }
};

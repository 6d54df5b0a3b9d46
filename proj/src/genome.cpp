#include "varsel/genome.hpp"

#include <algorithm>
#include <bit>
#include <charconv>

#include "varsel/errors.hpp"

namespace varsel {

namespace {

std::uint64_t mask_of(const Chromosome& c) noexcept {
    std::uint64_t m = 0;
    for (Gene g : c.genes()) m |= std::uint64_t{1} << g;
    return m;
}

std::vector<Gene> genes_of(std::uint64_t mask) {
    std::vector<Gene> genes;
    genes.reserve(static_cast<std::size_t>(std::popcount(mask)));
    while (mask != 0) {
        genes.push_back(static_cast<Gene>(std::countr_zero(mask)));
        mask &= mask - 1;
    }
    return genes;
}

std::uint64_t low_bits(std::size_t n_vars) {
    return n_vars >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_vars) - 1;
}

}  // namespace

Chromosome Chromosome::from_genes(std::vector<Gene> genes) {
    if (genes.empty()) throw EmptyChromosome("chromosome must express at least one gene");
    std::sort(genes.begin(), genes.end());
    if (std::adjacent_find(genes.begin(), genes.end()) != genes.end())
        throw Error("chromosome has duplicate genes");
    if (genes.back() >= kMaxVars)
        throw IndexOutOfRange("gene " + std::to_string(genes.back()) + " exceeds the " +
                              std::to_string(kMaxVars) + "-variable limit");
    return Chromosome(std::move(genes));
}

Chromosome Chromosome::full(std::size_t n_vars) {
    if (n_vars == 0) throw EmptyChromosome("full set over zero variables");
    std::vector<Gene> genes(n_vars);
    for (std::size_t i = 0; i < n_vars; ++i) genes[i] = static_cast<Gene>(i);
    return from_genes(std::move(genes));
}

bool Chromosome::contains(Gene g) const noexcept {
    return std::binary_search(genes_.begin(), genes_.end(), g);
}

Chromosome from_bitmask(const Bitmask& bits) {
    std::vector<Gene> genes;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) genes.push_back(static_cast<Gene>(i));
    if (genes.empty()) throw EmptyChromosome("bitmask has no bit set");
    return Chromosome::from_genes(std::move(genes));
}

Bitmask to_bitmask(const Chromosome& c, std::size_t n_vars) {
    if (c.max_gene() >= n_vars)
        throw IndexOutOfRange("gene " + std::to_string(c.max_gene()) + " out of range for " +
                              std::to_string(n_vars) + " variables");
    Bitmask bits(n_vars, false);
    for (Gene g : c.genes()) bits[g] = true;
    return bits;
}

GeneKey canonical_key(const Chromosome& c) noexcept { return GeneKey{mask_of(c)}; }

Chromosome from_key(GeneKey key) {
    if (key.bits == 0) throw EmptyChromosome("zero key");
    return Chromosome::from_genes(genes_of(key.bits));
}

std::optional<Chromosome> try_uniform_crossover(const Chromosome& a, const Chromosome& b,
                                                double p_one_parent, Rng& rng) {
    const std::uint64_t ma = mask_of(a);
    const std::uint64_t mb = mask_of(b);
    std::uint64_t child = ma & mb;
    std::uint64_t either = ma ^ mb;
    while (either != 0) {
        const std::uint64_t bit = either & (~either + 1);
        if (rng.bernoulli(p_one_parent)) child |= bit;
        either &= either - 1;
    }
    if (child == 0) return std::nullopt;
    return Chromosome::from_genes(genes_of(child));
}

Chromosome uniform_crossover(const Chromosome& a, const Chromosome& b, double p_one_parent,
                             Rng& rng) {
    auto child = try_uniform_crossover(a, b, p_one_parent, rng);
    if (!child) throw EmptyChromosome("crossover produced no genes");
    return *std::move(child);
}

Chromosome mutate(const Chromosome& c, double rate, std::size_t n_vars, Rng& rng) {
    if (c.max_gene() >= n_vars)
        throw IndexOutOfRange("gene " + std::to_string(c.max_gene()) + " out of range for " +
                              std::to_string(n_vars) + " variables");
    const std::uint64_t base = mask_of(c);
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        std::uint64_t m = base;
        for (std::size_t pos = 0; pos < n_vars; ++pos)
            if (rng.bernoulli(rate)) m ^= std::uint64_t{1} << pos;
        m &= low_bits(n_vars);
        if (m != 0) return Chromosome::from_genes(genes_of(m));
    }
    return c;
}

std::string to_hyphen_string(const Chromosome& c) {
    std::string out;
    for (Gene g : c.genes()) {
        if (!out.empty()) out.push_back('-');
        out += std::to_string(g + 1);
    }
    return out;
}

Chromosome parse_hyphen_string(std::string_view text) {
    std::vector<Gene> genes;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t dash = std::min(text.find('-', pos), text.size());
        const std::string_view tok = text.substr(pos, dash - pos);
        unsigned value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() || value == 0)
            throw ParseError("malformed gene list '" + std::string(text) + "'");
        genes.push_back(static_cast<Gene>(value - 1));
        pos = dash + 1;
    }
    return Chromosome::from_genes(std::move(genes));
}

nlohmann::json to_json(const Chromosome& c) {
    auto arr = nlohmann::json::array();
    for (Gene g : c.genes()) arr.push_back(g + 1);
    return arr;
}

Chromosome chromosome_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("chromosome JSON must be an array");
    std::vector<Gene> genes;
    for (const auto& v : j) {
        if (!v.is_number_unsigned() || v.get<unsigned>() == 0)
            throw ParseError("chromosome JSON entries must be positive integers");
        genes.push_back(v.get<Gene>() - 1);
    }
    return Chromosome::from_genes(std::move(genes));
}

}  // namespace varsel

#include "varsel/report.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "varsel/errors.hpp"
#include "varsel/simd/kernels.hpp"

namespace varsel {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<nlohmann::json> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(nlohmann::json::parse(line));
    return out;
}

double sse_or_inf(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

std::string format_sse(double v) {
    if (!std::isfinite(v)) return "inf";
    return nlohmann::json(v).dump();
}

}  // namespace

GenerationLog::GenerationLog(const std::filesystem::path& path)
    : out_(open_for_write(path)), path_(path) {}

void GenerationLog::append(const GenerationReport& r) {
    out_ << to_json(r).dump() << '\n';
    out_.flush();
    if (!out_) throw IoError("write to '" + path_.string() + "' failed");
    elapsed_.push_back(r.elapsed_seconds);
}

void write_graveyard_jsonl(const Graveyard& g, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    for (const auto& rec : g.audit()) out << to_json(rec).dump() << '\n';
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

nlohmann::json member_json(const Member& m, const std::vector<std::string>& var_names) {
    nlohmann::json names = nlohmann::json::array();
    for (Gene g : m.chromosome.genes())
        if (g < var_names.size()) names.push_back(var_names[g]);
    return {
        {"genes", to_json(m.chromosome)},
        {"label", to_hyphen_string(m.chromosome)},
        {"var_names", names},
        {"gene_count", m.score.gene_count},
        {"cv_sse", finite_or_null(m.score.cv_sse)},
        {"train_sse", finite_or_null(m.score.train_sse)},
    };
}

nlohmann::json make_summary(const RunConfig& cfg, const RunResult& result,
                            const std::vector<std::string>& var_names) {
    std::size_t total = result.initial.new_evaluations;
    for (const auto& r : result.reports) total += r.new_evaluations;
    return {
        {"best", member_json(result.best, var_names)},
        {"graveyard_size", result.graveyard.size()},
        {"total_evaluations", total},
        {"generations_completed", result.reports.empty() ? 0 : result.reports.back().generation},
        {"exhausted", result.exhausted},
        {"kernel_backend", std::string(simd::backend_name(simd::active_backend()))},
        {"config", to_json(cfg)},
    };
}

void write_scores_csv(const ExhaustiveResult& r, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "genes,gene_count,cv_sse,train_sse\n";
    for (const auto& m : r.table)
        out << to_hyphen_string(m.chromosome) << ',' << m.score.gene_count << ','
            << format_sse(m.score.cv_sse) << ',' << format_sse(m.score.train_sse) << '\n';
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<std::string> check_run_outputs(const std::filesystem::path& dir) {
    std::vector<std::string> problems;
    const auto gens = read_jsonl(dir / kGenerationsFile);
    const auto audit = read_jsonl(dir / kGraveyardFile);
    std::ifstream sin(dir / kSummaryFile);
    if (!sin) return {"summary.json missing"};
    const nlohmann::json summary = nlohmann::json::parse(sin);

    if (gens.empty()) return {"generations.jsonl is empty"};

    std::size_t evals = 0;
    double prev_best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto& g = gens[i];
        if (g.at("generation").get<std::size_t>() != i)
            problems.push_back("generation index " + std::to_string(i) + " out of sequence");
        evals += g.at("new_evaluations").get<std::size_t>();
        if (g.at("graveyard_size").get<std::size_t>() != evals)
            problems.push_back("generation " + std::to_string(i) +
                               ": graveyard_size differs from the running evaluation count");
        const double best = sse_or_inf(g.at("best_cv_sse"));
        if (best > prev_best)
            problems.push_back("generation " + std::to_string(i) + ": best cv_sse increased");
        prev_best = best;
    }

    std::size_t fresh = 0;
    std::optional<Member> best;
    for (const auto& j : audit) {
        const AuditRecord rec = audit_record_from_json(j);
        if (rec.was_cached) continue;
        ++fresh;
        Member m{rec.chromosome, rec.score};
        if (!best || ranks_before(m, *best)) best = m;
    }

    const std::size_t graveyard_size = summary.at("graveyard_size").get<std::size_t>();
    if (fresh != graveyard_size) problems.push_back("graveyard.jsonl evaluation count != summary graveyard_size");
    if (evals != graveyard_size) problems.push_back("summed new_evaluations != summary graveyard_size");
    if (summary.at("total_evaluations").get<std::size_t>() != evals)
        problems.push_back("summary total_evaluations != summed new_evaluations");
    if (summary.at("generations_completed").get<std::size_t>() != gens.size() - 1)
        problems.push_back("summary generations_completed != last generation index");

    const auto& sbest = summary.at("best");
    if (!best) {
        problems.push_back("graveyard.jsonl holds no evaluations");
    } else {
        if (chromosome_from_json(sbest.at("genes")) != best->chromosome)
            problems.push_back("summary best genes != graveyard minimum");
        if (sse_or_inf(sbest.at("cv_sse")) != best->score.cv_sse)
            problems.push_back("summary best cv_sse != graveyard minimum");
    }
    if (sse_or_inf(sbest.at("cv_sse")) != sse_or_inf(gens.back().at("best_cv_sse")))
        problems.push_back("summary best cv_sse != final generation best");
    return problems;
}

}  // namespace varsel

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "varsel/config.hpp"
#include "varsel/engine.hpp"
#include "varsel/fitness.hpp"

namespace varsel {

/// File names written into the output directory.
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kGenerationsFile = "generations.jsonl";
inline constexpr const char* kGraveyardFile = "graveyard.jsonl";
inline constexpr const char* kTimingFile = "timing.json";
inline constexpr const char* kScoresFile = "scores.csv";

/// Streams one JSON line per generation as the search runs.
class GenerationLog {
public:
    explicit GenerationLog(const std::filesystem::path& path);
    void append(const GenerationReport& r);

    /// Per-generation wall time, kept out of the JSON-lines stream.
    const std::vector<double>& elapsed() const noexcept { return elapsed_; }

private:
    std::ofstream out_;
    std::filesystem::path path_;
    std::vector<double> elapsed_;
};

void write_graveyard_jsonl(const Graveyard& g, const std::filesystem::path& path);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

nlohmann::json member_json(const Member& m, const std::vector<std::string>& var_names);

/// Final summary: best chromosome, evaluation counts and the config echo.
/// Contains nothing timing- or thread-dependent.
nlohmann::json make_summary(const RunConfig& cfg, const RunResult& result,
                            const std::vector<std::string>& var_names);

/// Exhaustive score table: genes (1-based, hyphen-joined), gene_count, cv_sse, train_sse.
void write_scores_csv(const ExhaustiveResult& r, const std::filesystem::path& path);

/// Re-derives the summary's numbers from generations.jsonl and graveyard.jsonl.
/// Returns one message per inconsistency; empty means consistent.
std::vector<std::string> check_run_outputs(const std::filesystem::path& dir);

}  // namespace varsel

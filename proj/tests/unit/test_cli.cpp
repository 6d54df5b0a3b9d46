#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "varsel/data.hpp"
#include "varsel/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kTmp = VARSEL_TEST_TMP;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(const std::string& args) {
    fs::create_directories(kTmp);
    const fs::path out = kTmp / "stdout.txt", err = kTmp / "stderr.txt";
    const std::string cmd = std::string("\"") + VARSEL_CLI_PATH + "\" " + args + " >\"" + out.string() +
                            "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

/// An 8-sensor dataset and a fast config next to it.
fs::path small_setup(const std::string& name) {
    const fs::path dir = kTmp / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    REQUIRE(cli("synth --n-vars 8 --n-samples 120 --informative 1-3 --seed 5 --out \"" +
                (dir / "data.csv").string() + "\"")
                .code == 0);
    std::ofstream(dir / "run.cfg") << "data_path = data.csv\n"
                                      "n_train = 60\n"
                                      "population_size = 12\n"
                                      "survival_fraction = 0.25\n"
                                      "generations = 3\n"
                                      "hidden_units = 2\n"
                                      "max_iterations = 20\n";
    return dir;
}

}  // namespace

TEST_CASE("synth defaults") {
    const fs::path out = kTmp / "synth" / "default.csv";
    fs::remove_all(out.parent_path());
    const Outcome r = cli("synth --out \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    const std::string text = slurp(out);
    CHECK(line_count(text) == 401);
    const varsel::Dataset d = varsel::load_csv(out, "level");
    CHECK(d.n_vars() == 20);
    CHECK(d.n_samples() == 400);
    CHECK(d.var_names.front() == "s1");

    const json meta = json::parse(slurp(out.string() + ".meta.json"));
    CHECK(meta.at("informative") == json::array({2, 5, 9, 14}));
    CHECK(meta.at("seed") == 1);

    REQUIRE(cli("synth --out \"" + out.string() + "\"").code == 0);
    CHECK(slurp(out) == text);

    CHECK(cli("synth --n-vars 4 --informative 1-9 --out \"" + out.string() + "\"").code == 1);
    CHECK(cli("synth --informative x-y --out \"" + out.string() + "\"").code == 1);
}

TEST_CASE("run writes consistent outputs") {
    const fs::path dir = small_setup("run");
    const fs::path out = dir / "out";
    const Outcome r = cli("run --config \"" + (dir / "run.cfg").string() + "\" --out-dir \"" + out.string() +
                          "\" --mutation-rate 0.2 --threads 2");
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("best ", 0) == 0);
    for (const char* f : {varsel::kSummaryFile, varsel::kGenerationsFile, varsel::kGraveyardFile, varsel::kTimingFile})
        CHECK(fs::exists(out / f));
    CHECK(varsel::check_run_outputs(out).empty());

    const json summary = json::parse(slurp(out / varsel::kSummaryFile));
    CHECK(summary.at("config").at("mutation_rate") == 0.2);
    CHECK(summary.at("config").at("population_size") == 12);
    CHECK(summary.at("generations_completed") == 3);
    CHECK(summary.at("graveyard_size") == 12 + 3 * 9);
    CHECK(line_count(slurp(out / varsel::kGenerationsFile)) == 4);
    CHECK(line_count(slurp(out / varsel::kGraveyardFile)) == 12 + 3 * 9);
}

TEST_CASE("error exit codes") {
    const fs::path dir = small_setup("errors");
    const std::string cfg = "--config \"" + (dir / "run.cfg").string() + "\" --out-dir \"" + (dir / "o").string() + "\"";

    const Outcome missing = cli("run " + cfg + " --target furnace_temp");
    CHECK(missing.code == 2);
    CHECK(missing.err.find("furnace_temp") != std::string::npos);

    std::ofstream(dir / "broken.csv") << "s1,level\n1,2\n3,oops\n";
    CHECK(cli("run " + cfg + " --data \"" + (dir / "broken.csv").string() + "\"").code == 2);

    std::ofstream(dir / "bad.cfg") << "population_sise = 10\n";
    const Outcome bad = cli("run --config \"" + (dir / "bad.cfg").string() + "\"");
    CHECK(bad.code == 1);
    CHECK(bad.err.find("population_sise") != std::string::npos);

    CHECK(cli("run " + cfg + " --survival 1.5").code == 1);
    CHECK(cli("run " + cfg + " --population 300").code == 1);  // more than 2^8 - 1
    CHECK(cli("run " + cfg + " --no-such-flag").code == 1);
    CHECK(cli("run " + cfg + " --data /nonexistent/file.csv").code == 1);
}

TEST_CASE("exhaustive") {
    const fs::path dir = small_setup("exhaustive");
    const fs::path out = dir / "out";
    const std::string args = "exhaustive --config \"" + (dir / "run.cfg").string() + "\" --out-dir \"" + out.string() + "\"";
    const Outcome r = cli(args + " --threads 4");
    INFO(r.err);
    REQUIRE(r.code == 0);

    const std::string table = slurp(out / varsel::kScoresFile);
    CHECK(line_count(table) == 256);

    // The reported winner is the smallest cv_sse row (ties: fewer genes first, as in the file order).
    std::istringstream rows(table);
    std::string line, best_genes;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_count = 0;
    std::getline(rows, line);
    CHECK(line == "genes,gene_count,cv_sse,train_sse");
    while (std::getline(rows, line)) {
        std::istringstream cells(line);
        std::string genes, count, cv;
        std::getline(cells, genes, ',');
        std::getline(cells, count, ',');
        std::getline(cells, cv, ',');
        const double v = std::stod(cv);
        const std::size_t k = std::stoul(count);
        if (v < best || (v == best && k < best_count)) {
            best = v;
            best_count = k;
            best_genes = genes;
        }
    }
    CHECK(r.out.rfind("winner " + best_genes + " ", 0) == 0);

    REQUIRE(cli(args + " --threads 1").code == 0);
    CHECK(slurp(out / varsel::kScoresFile) == table);

    std::ofstream(dir / "cap.cfg") << "data_path = data.csv\nn_train = 60\nexhaustive_cap = 6\n";
    CHECK(cli("exhaustive --config \"" + (dir / "cap.cfg").string() + "\" --out-dir \"" + out.string() + "\"").code == 1);
}

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../support/oracles.hpp"
#include "varsel/data.hpp"
#include "varsel/engine.hpp"
#include "varsel/genome.hpp"
#include "varsel/mlp.hpp"
#include "varsel/rng.hpp"

using namespace varsel;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// Every GA run in this binary is checked for the never-retest and elitism
// properties, not only the ones built for those criteria.
struct RunAudit {
    std::size_t runs = 0;
    std::size_t retest_violations = 0;
    std::size_t elitism_violations = 0;

    RunResult checked_run(const GaConfig& cfg, const SplitDataset& split, const TrainConfig& tc) {
        const auto before = lm_invocations();
        RunResult r = run(cfg, split, tc, worker_count());
        ++runs;
        if (lm_invocations() - before != r.graveyard.size()) ++retest_violations;
        double prev = r.initial.best.score.cv_sse;
        for (const auto& rep : r.reports) {
            if (!(rep.best.score.cv_sse <= prev)) ++elitism_violations;
            prev = rep.best.score.cv_sse;
        }
        return r;
    }
};

RunAudit audit;

std::uint64_t mask(const Chromosome& c) { return canonical_key(c).bits; }

Chromosome random_chromosome(std::size_t n, Rng& rng) {
    for (;;) {
        std::uint64_t m = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (rng.bernoulli(0.5)) m |= std::uint64_t{1} << i;
        if (m) return from_key(GeneKey{m});
    }
}

Verdict subset_arithmetic() {
    const auto n = subset_count(20);
    return {n == 1048575, fmt("subset_count(20) = %llu", static_cast<unsigned long long>(n))};
}

Verdict oracle_equivalence() {
    TrainConfig tc;
    tc.hidden_units = 3;
    std::size_t exact = 0, near = 0;
    std::string worst;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SplitDataset split =
            split_sequential(synth_lfcm(8, 400, Chromosome::from_genes({0, 1, 2}), 0.1, seed), 200);
        const ExhaustiveResult ex = exhaustive_search(8, split, tc, seed, kDefaultExhaustiveCap, worker_count());

        GaConfig cfg;
        cfg.n_vars = 8;
        cfg.population_size = 20;
        cfg.survival_fraction = 0.25;
        cfg.mutation_rate = 0.1;
        cfg.generations = 15;
        cfg.master_seed = seed;
        const RunResult ga = audit.checked_run(cfg, split, tc);

        if (ga.best.chromosome == ex.best.chromosome) {
            ++exact;
        } else {
            const double rel = ga.best.score.cv_sse / ex.best.score.cv_sse - 1.0;
            if (rel <= 0.05) ++near;
            worst += fmt("; seed %llu off by %.3g%%", static_cast<unsigned long long>(seed), 100 * rel);
        }
    }
    return {exact >= 4 && exact + near == 5, fmt("%zu/5 identical winners", exact) + worst};
}

Verdict never_retest() {
    return {audit.runs > 0 && audit.retest_violations == 0,
            fmt("%zu runs, %zu with train_lm calls != graveyard size", audit.runs, audit.retest_violations)};
}

Verdict elitism() {
    return {audit.runs > 0 && audit.elitism_violations == 0,
            fmt("%zu runs, %zu generation-best increases", audit.runs, audit.elitism_violations)};
}

Verdict jacobian() {
    Rng rng(99);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + rng.below(4), h = 1 + rng.below(4);
        MlpParams p{d, h, std::vector<double>(MlpParams::count(d, h))};
        for (double& w : p.weights) w = rng.uniform(-1, 1);
        Matrix x(8, d);
        for (double& v : x.data()) v = rng.uniform(-1, 1);
        const ResidualJacobian rj = residual_jacobian(p, x, std::vector<double>(8, 0.0));
        worst = std::max(worst, oracle::max_relative_deviation(rj.jacobian, oracle::fd_jacobian(p, x, 1e-6)));
    }
    return {worst < 1e-4, fmt("max relative deviation %.3g over 100 networks", worst)};
}

Verdict lm_convergence() {
    Matrix xq(64, 1);
    std::vector<double> yq(64);
    for (std::size_t i = 0; i < 64; ++i) {
        xq(i, 0) = -1.0 + 2.0 * static_cast<double>(i) / 63.0;
        yq[i] = xq(i, 0) * xq(i, 0);
    }
    TrainConfig qc;
    qc.hidden_units = 4;
    qc.max_iterations = 200;
    const TrainedModel quad = train_lm(xq, yq, qc);

    MlpParams teacher = init_weights(2, 1, 104);
    for (double& w : teacher.weights) w *= 2.0;
    Rng rng(4);
    Matrix xr(50, 2);
    std::vector<double> yr(50);
    for (std::size_t i = 0; i < 50; ++i) {
        xr(i, 0) = rng.uniform(-1, 1);
        xr(i, 1) = rng.uniform(-1, 1);
        yr[i] = oracle::network_output(teacher.weights, 2, 1, xr.row(i).data());
    }
    TrainConfig rc;
    rc.hidden_units = 1;
    rc.weight_seed = 7;
    const TrainedModel rep = train_lm(xr, yr, rc);

    const bool ok = quad.train_sse < 1e-4 && quad.iterations_used <= 200 && rep.train_sse < 1e-8;
    return {ok, fmt("quadratic SSE %.3g after %zu iterations; representable SSE %.3g", quad.train_sse,
                    quad.iterations_used, rep.train_sse)};
}

Verdict crossover_law() {
    Rng rng(31);
    std::size_t pairs = 0, violations = 0;
    while (pairs < 20000) {
        const Chromosome a = random_chromosome(20, rng), b = random_chromosome(20, rng);
        const auto child = try_uniform_crossover(a, b, 0.5, rng);
        if (!child) continue;  // disjoint parents that drew nothing
        ++pairs;
        const std::uint64_t m = mask(*child), both = mask(a) & mask(b), either = mask(a) | mask(b);
        if ((m & both) != both || (m & ~either) != 0) ++violations;
    }
    return {violations == 0, fmt("%zu parent pairs, %zu violations", pairs, violations)};
}

Verdict mutation_calibration() {
    Rng rng(77);
    const std::size_t trials = 200000;
    std::uint64_t flips = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const Chromosome base = random_chromosome(20, rng);
        flips += std::popcount(mask(base) ^ mask(mutate(base, 0.1, 20, rng)));
    }
    const double mean = static_cast<double>(flips) / trials;
    const double rate = mean / 20.0;
    const bool ok = std::abs(rate - 0.1) <= 0.005 && std::abs(mean - 2.0) <= 0.05;
    return {ok, fmt("flip rate %.5f, mean flips %.4f over %zu trials", rate, mean, trials)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict thread_determinism() {
    const fs::path dir = VARSEL_TEST_TMP;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = std::string("\"") + VARSEL_CLI_PATH + "\"";
    const std::string quiet = " >/dev/null 2>&1";
    if (shell(cli + " synth --n-vars 12 --n-samples 200 --informative 2-5-9 --seed 3 --out \"" +
              (dir / "data.csv").string() + "\"" + quiet) != 0)
        return {false, "synth failed"};
    const std::string common = " run --data \"" + (dir / "data.csv").string() +
                               "\" --n-train 100 --population 24 --survival 0.25 --generations 6"
                               " --hidden-units 3 --seed 11";
    for (const char* t : {"1", "8"})
        if (shell(cli + common + " --threads " + t + " --out-dir \"" + (dir / ("t" + std::string(t))).string() +
                  "\"" + quiet) != 0)
            return {false, std::string("run with --threads ") + t + " failed"};
    bool same = true;
    for (const char* f : {"summary.json", "generations.jsonl"}) {
        const std::string a = slurp(dir / "t1" / f), b = slurp(dir / "t8" / f);
        same = same && !a.empty() && a == b;
    }
    return {same, same ? "summary.json and generations.jsonl byte-identical" : "outputs differ"};
}

Verdict evaluation_budget() {
    // Only the count matters here, so the networks are kept tiny.
    const SplitDataset split =
        split_sequential(synth_lfcm(20, 120, Chromosome::from_genes({1, 4, 8, 13}), 0.1, 9), 60);
    TrainConfig tc;
    tc.hidden_units = 1;
    tc.max_iterations = 5;
    GaConfig cfg;
    cfg.n_vars = 20;
    cfg.population_size = 50;
    cfg.survival_fraction = 0.20;
    cfg.generations = 25;
    cfg.master_seed = 2;
    const auto before = lm_invocations();
    const RunResult r = audit.checked_run(cfg, split, tc);
    const auto built = lm_invocations() - before;
    std::size_t total = r.initial.new_evaluations;
    for (const auto& rep : r.reports) total += rep.new_evaluations;
    const bool ok = total == 1050 && built == 1050 && r.graveyard.size() == 1050 && total >= 1000 && total <= 2000;
    return {ok, fmt("%zu evaluations, %llu models trained, graveyard %zu", total,
                    static_cast<unsigned long long>(built), r.graveyard.size())};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Verdict()> check;
    };
    // The two run-audit criteria come last so they cover every run above them.
    const std::vector<Criterion> criteria = {
        {"search-space arithmetic", subset_arithmetic},
        {"oracle equivalence", oracle_equivalence},
        {"jacobian correctness", jacobian},
        {"lm convergence", lm_convergence},
        {"crossover law", crossover_law},
        {"mutation calibration", mutation_calibration},
        {"determinism under parallelism", thread_determinism},
        {"evaluation budget", evaluation_budget},
        {"never-retest", never_retest},
        {"elitism monotonicity", elitism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  %-30s %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !v.pass;
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

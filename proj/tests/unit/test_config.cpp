#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "varsel/config.hpp"
#include "varsel/errors.hpp"

using namespace varsel;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "varsel_test_config";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("defaults") {
    const RunConfig c = parse("");
    CHECK(c.ga == GaConfig{});
    CHECK(c.train == TrainConfig{});
    CHECK(c.target_column == "level");
    CHECK(c.n_train == 200);
    CHECK(c.threads == 1);
    CHECK(c.exhaustive_cap == kDefaultExhaustiveCap);
}

TEST_CASE("parsing") {
    const RunConfig c = parse(
        "# full-line comment\n"
        "\n"
        "population_size = 30\n"
        "  survival_fraction=0.25   # trailing comment\n"
        "mutation_rate = 0.05\n"
        "generations = 12\n"
        "master_seed = 18446744073709551615\n"
        "hidden_units = 4\n"
        "lambda_init = 1e-2\n"
        "data_path = sensors.csv\n"
        "target_column = y\n"
        "threads = 6\n");
    CHECK(c.ga.population_size == 30);
    CHECK(c.ga.survival_fraction == 0.25);
    CHECK(c.ga.mutation_rate == 0.05);
    CHECK(c.ga.generations == 12);
    CHECK(c.ga.master_seed == 18446744073709551615ull);
    CHECK(c.train.hidden_units == 4);
    CHECK(c.train.lambda_init == 0.01);
    CHECK(c.data_path == "sensors.csv");
    CHECK(c.target_column == "y");
    CHECK(c.threads == 6);
}

TEST_CASE("errors carry the line number") {
    auto message = [](const std::string& text) {
        try {
            parse(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("population_size = 10\nbogus_key = 3\n").find("test.cfg:2") != std::string::npos);
    CHECK(message("bogus_key = 3\n").find("bogus_key") != std::string::npos);
    CHECK(message("population_size = ten\n").find("population_size") != std::string::npos);
    CHECK_FALSE(message("no equals sign here\n").empty());
    CHECK_FALSE(message("mutation_rate = 0.1x\n").empty());
    CHECK_FALSE(message("generations = -3\n").empty());
}

TEST_CASE("apply_setting") {
    RunConfig c;
    apply_setting(c, "mutation_rate", "0.2");
    CHECK(c.ga.mutation_rate == 0.2);
    CHECK_THROWS_AS(apply_setting(c, "nope", "1"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "threads", ""), ConfigError);
}

TEST_CASE("text round trip") {
    RunConfig c;
    c.ga.population_size = 44;
    c.ga.mutation_rate = 0.0625;
    c.ga.master_seed = 987654321;
    c.train.tol_rel = 1.25e-7;
    c.data_path = "/tmp/x.csv";
    c.target_column = "out";
    c.n_train = 77;
    c.threads = 3;
    c.out_dir = "/tmp/out";
    const RunConfig back = parse(to_config_text(c));
    CHECK(back.ga == c.ga);
    CHECK(back.train.tol_rel == c.train.tol_rel);
    CHECK(back.data_path == c.data_path);
    CHECK(back.target_column == c.target_column);
    CHECK(back.n_train == c.n_train);
    CHECK(back.threads == c.threads);
    CHECK(back.out_dir == c.out_dir);
}

TEST_CASE("JSON echo") {
    RunConfig c;
    c.ga.n_vars = 8;
    c.ga.p_one_parent = 0.4;
    c.train.hidden_units = 3;
    c.data_path = "d.csv";
    c.threads = 8;
    c.out_dir = "somewhere";
    const auto j = to_json(c);
    CHECK_FALSE(j.contains("threads"));
    CHECK_FALSE(j.contains("out_dir"));
    CHECK_FALSE(j.contains("weight_seed"));
    CHECK(j.at("hidden_units") == 3);
    CHECK(j.at("p_one_parent") == 0.4);

    const RunConfig back = run_config_from_json(j);
    CHECK(back.ga == c.ga);
    CHECK(back.train.hidden_units == 3);
    CHECK(back.data_path == c.data_path);
    CHECK(back.threads == 1);

    RunConfig other = c;
    other.threads = 1;
    other.out_dir = "elsewhere";
    CHECK(to_json(other) == j);
}

TEST_CASE("files") {
    const fs::path dir = scratch_dir();
    { std::ofstream(dir / "data.csv") << "a,level\n1,2\n"; }
    { std::ofstream(dir / "run.cfg") << "data_path = data.csv\npopulation_size = 12\n"; }

    const RunConfig c = load_config(dir / "run.cfg");
    CHECK(c.data_path == dir / "data.csv");
    CHECK(c.ga.population_size == 12);
    CHECK_NOTHROW(validate(c));

    CHECK_THROWS_AS(load_config(dir / "missing.cfg"), ConfigError);

    { std::ofstream(dir / "abs.cfg") << "data_path = /definitely/not/here.csv\n"; }
    const RunConfig abs = load_config(dir / "abs.cfg");
    CHECK(abs.data_path == "/definitely/not/here.csv");
    CHECK_THROWS_AS(validate(abs), ConfigError);
}

TEST_CASE("validate") {
    const fs::path dir = scratch_dir();
    { std::ofstream(dir / "v.csv") << "a,level\n1,2\n"; }
    RunConfig c;
    c.data_path = dir / "v.csv";
    CHECK_NOTHROW(validate(c));

    RunConfig bad = c;
    bad.threads = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.n_train = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.target_column.clear();
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.data_path.clear();
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.ga.survival_fraction = 1.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = c;
    bad.train.hidden_units = 0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

// End-to-end CLI checks. The binary path arrives via the FANOVA_CLI
// environment variable (set by ctest).

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* path = std::getenv("FANOVA_CLI");
    REQUIRE_MESSAGE(path != nullptr, "FANOVA_CLI must point at the fanova binary");
    return path;
}

int run(const std::string& args) {
    const std::string command = cli() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "missing file: " << path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("/tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const char* kRunsCsv =
    "variant_id,m0,m1,dimension,budget,problem_id,instance_id,run_id,precision\n";

// two variants x two problems x two instances x one run, two budgets
void write_runs(const fs::path& file) {
    std::ofstream out(file);
    out << kRunsCsv;
    int id = 0;
    for (const char* m0 : {"o0", "o1"}) {
        for (const char* m1 : {"o0", "o1"}) {
            for (int problem = 1; problem <= 2; ++problem)
                for (int instance = 1; instance <= 2; ++instance)
                    for (const int budget : {500, 2500}) {
                        const double precision =
                            (std::string(m0) == "o1" ? 1e-4 : 1e-2) * (problem + instance) *
                            (budget == 500 ? 10 : 1);
                        out << id << "," << m0 << "," << m1 << ",5," << budget << "," << problem
                            << "," << instance << ",0," << precision << "\n";
                    }
            ++id;
        }
    }
}

void write_space(const fs::path& file) {
    std::ofstream out(file);
    out << R"([{"name": "m0", "options": ["o0", "o1"]},
               {"name": "m1", "options": ["o0", "o1"]}])";
}

void write_truth(const fs::path& file) {
    // singleton + pair mix: generic enough for greedy trees to split on
    std::ofstream out(file);
    out << R"({"components": [
        {"modules": ["m0"], "values": [1.0, -1.0]},
        {"modules": ["m1"], "values": [0.25, -0.25]},
        {"modules": ["m0", "m1"], "values": [[0.5, -0.5], [-0.5, 0.5]]}]})";
}

}  // namespace

TEST_CASE("synth then analyze round-trips and is deterministic") {
    TempDir dir("fanova_cli_synth");
    write_space(dir.path / "space.json");
    write_truth(dir.path / "truth.json");
    const std::string base = " --space " + (dir.path / "space.json").string() + " --truth " +
                             (dir.path / "truth.json").string() + " --seed 3 --noise-sd 0.1 --out ";

    REQUIRE(run("synth" + base + (dir.path / "a").string()) == 0);
    REQUIRE(run("synth" + base + (dir.path / "b").string()) == 0);
    CHECK(slurp(dir.path / "a/dataset.csv") == slurp(dir.path / "b/dataset.csv"));
    CHECK(slurp(dir.path / "a/truth.json") == slurp(dir.path / "b/truth.json"));

    const int status = run("analyze --space " + (dir.path / "space.json").string() + " --data " +
                           (dir.path / "a/dataset.csv").string() + " --engine exact --max-order 2 --out " +
                           (dir.path / "report").string());
    REQUIRE(status == 0);
    // analytic fractions: m0 76.2%, m1 4.8%, pair 19.0%; noise shifts them a little
    const std::string effects = slurp(dir.path / "report/effects.csv");
    CHECK(effects.find("m0,1,7") != std::string::npos);
    CHECK(fs::exists(dir.path / "report/pairs.csv"));
    // max_order 2: no triplet-level reports
    CHECK(!fs::exists(dir.path / "report/summary.csv"));
    CHECK(!fs::exists(dir.path / "report/triplets.csv"));
    CHECK(fs::exists(dir.path / "report/run-manifest.json"));
}

TEST_CASE("ingest produces a cells cache that analyze consumes") {
    TempDir dir("fanova_cli_ingest");
    write_space(dir.path / "space.json");
    write_runs(dir.path / "runs.csv");

    REQUIRE(run("ingest --space " + (dir.path / "space.json").string() + " --runs " +
                (dir.path / "runs.csv").string() + " --out " + dir.path.string()) == 0);
    const std::string cells = slurp(dir.path / "cells.csv");
    CHECK(cells.find("log_precision") != std::string::npos);

    // suite-level analysis on the cache
    REQUIRE(run("analyze --space " + (dir.path / "space.json").string() + " --data " +
                (dir.path / "cells.csv").string() +
                " --scenario suite --dim 5 --budget 500 --engine exact --max-order 2 --out " +
                (dir.path / "suite").string()) == 0);
    CHECK(slurp(dir.path / "suite/effects.csv").find("m0,1,") != std::string::npos);

    // the same analysis straight from the runs file matches byte for byte
    REQUIRE(run("analyze --space " + (dir.path / "space.json").string() + " --data " +
                (dir.path / "runs.csv").string() +
                " --scenario suite --dim 5 --budget 500 --engine exact --max-order 2 --out " +
                (dir.path / "suite_raw").string()) == 0);
    CHECK(slurp(dir.path / "suite/effects.csv") == slurp(dir.path / "suite_raw/effects.csv"));

    // all-problems fans out per-problem reports for the similarity workflow
    REQUIRE(run("analyze --space " + (dir.path / "space.json").string() + " --data " +
                (dir.path / "cells.csv").string() +
                " --scenario all-problems --dim 5 --budget 500 --engine exact --max-order 2 --out " +
                (dir.path / "problems").string()) == 0);
    CHECK(fs::exists(dir.path / "problems/problem_01/effects.csv"));
    CHECK(fs::exists(dir.path / "problems/problem_02/effects.csv"));

    REQUIRE(run("similarity --effects-dir " + (dir.path / "problems").string() +
                " --problems 1,2") == 0);
    const std::string matrix = slurp(dir.path / "problems/similarity.csv");
    CHECK(matrix.find("problem_id,1,2") == 0);

    SUBCASE("missing problem file is a data error") {
        CHECK(run("similarity --effects-dir " + (dir.path / "problems").string() +
                  " --problems 1,7") == 2);
    }
}

TEST_CASE("trajectory ingestion extracts cells at budget multipliers") {
    TempDir dir("fanova_cli_traj");
    write_space(dir.path / "space.json");
    {
        std::ofstream out(dir.path / "traj.csv");
        out << "variant_id,m0,m1,dimension,problem_id,instance_id,run_id,evals,best_f\n";
        for (const char* m0 : {"o0", "o1"}) {
            const std::string label(m0);
            out << "0," << m0 << ",o0,5,1,1,0,1,10.0\n";
            out << "0," << m0 << ",o0,5,1,1,0,400," << (label == "o0" ? "2.0" : "1.5") << "\n";
            out << "0," << m0 << ",o1,5,1,1,0,1,8.0\n";
        }
    }
    {
        std::ofstream out(dir.path / "optima.csv");
        out << "problem_id,instance_id,optimum\n1,1,1.0\n";
    }
    REQUIRE(run("ingest --space " + (dir.path / "space.json").string() + " --trajectories " +
                (dir.path / "traj.csv").string() + " --optima " + (dir.path / "optima.csv").string() +
                " --budget-multipliers 100 --out " + dir.path.string()) == 0);
    const std::string cells = slurp(dir.path / "cells.csv");
    // budget = 100 * dimension = 500; best_f at evals <= 500
    CHECK(cells.find(",5,500,1,1,0\n") != std::string::npos);           // log10(2.0 - 1.0) = 0
    CHECK(cells.find(",5,500,1,1,-0.30102999566") != std::string::npos);  // log10(0.5)

    SUBCASE("budgets and multipliers are mutually exclusive") {
        CHECK(run("ingest --space " + (dir.path / "space.json").string() + " --trajectories " +
                  (dir.path / "traj.csv").string() + " --optima " +
                  (dir.path / "optima.csv").string() + " --budgets 500 --budget-multipliers 100 --out " +
                  dir.path.string()) == 1);
    }
}

TEST_CASE("additive synthetic data gives the all-individual summary row") {
    TempDir dir("fanova_cli_additive");
    {
        std::ofstream out(dir.path / "space.json");
        out << R"([{"name": "m0", "options": ["o0", "o1"]},
                   {"name": "m1", "options": ["o0", "o1", "o2"]},
                   {"name": "m2", "options": ["o0", "o1"]}])";
    }
    {
        std::ofstream out(dir.path / "truth.json");
        out << R"({"components": [
            {"modules": ["m0"], "values": [1.0, -1.0]},
            {"modules": ["m1"], "values": [2.0, 0.0, -2.0]},
            {"modules": ["m2"], "values": [0.5, -0.5]}]})";
    }
    REQUIRE(run("synth --space " + (dir.path / "space.json").string() + " --truth " +
                (dir.path / "truth.json").string() + " --out " + dir.path.string()) == 0);
    REQUIRE(run("analyze --space " + (dir.path / "space.json").string() + " --data " +
                (dir.path / "dataset.csv").string() + " --engine exact --out " +
                (dir.path / "report").string()) == 0);
    const std::string summary = slurp(dir.path / "report/summary.csv");
    CHECK(summary ==
          "algorithm,dimension,budget,individual,pairwise,triple,total\n"
          "space,0,0,100.00,0.00,0.00,100.00\n");
    // the manifest keeps full-precision fractions next to the rounded CSVs
    const std::string manifest = slurp(dir.path / "report/run-manifest.json");
    CHECK(manifest.find("\"fractions\"") != std::string::npos);
    CHECK(manifest.find("\"subset\": \"m0;m1\"") != std::string::npos);

    SUBCASE("similarity of a problem with itself is a 1x1 unit matrix") {
        // single-problem directory layout
        fs::create_directories(dir.path / "problems/problem_03");
        fs::copy_file(dir.path / "report/effects.csv", dir.path / "problems/problem_03/effects.csv");
        REQUIRE(run("similarity --effects-dir " + (dir.path / "problems").string() +
                    " --problems 3") == 0);
        CHECK(slurp(dir.path / "problems/similarity.csv") == "problem_id,3\n3,1\n");
    }
}

TEST_CASE("determinism: same seed gives byte-identical forest reports") {
    TempDir dir("fanova_cli_determinism");
    write_space(dir.path / "space.json");
    write_runs(dir.path / "runs.csv");
    const std::string base = "analyze --space " + (dir.path / "space.json").string() + " --data " +
                             (dir.path / "runs.csv").string() +
                             " --scenario suite --dim 5 --budget 2500 --trees 16 --seed 9 "
                             "--max-order 2 --out ";
    REQUIRE(run(base + (dir.path / "r1").string()) == 0);
    REQUIRE(run(base + (dir.path / "r2").string()) == 0);
    CHECK(slurp(dir.path / "r1/effects.csv") == slurp(dir.path / "r2/effects.csv"));
    CHECK(slurp(dir.path / "r1/pairs.csv") == slurp(dir.path / "r2/pairs.csv"));
}

TEST_CASE("model save and load give identical decompositions") {
    TempDir dir("fanova_cli_model");
    write_space(dir.path / "space.json");
    write_runs(dir.path / "runs.csv");
    REQUIRE(run("analyze --space " + (dir.path / "space.json").string() + " --data " +
                (dir.path / "runs.csv").string() +
                " --scenario suite --dim 5 --budget 500 --trees 8 --seed 4 --max-order 2 "
                "--save-model " + (dir.path / "model.json").string() + " --out " +
                (dir.path / "direct").string()) == 0);
    REQUIRE(run("analyze --space " + (dir.path / "space.json").string() + " --load-model " +
                (dir.path / "model.json").string() + " --max-order 2 --out " +
                (dir.path / "reloaded").string()) == 0);
    CHECK(slurp(dir.path / "direct/effects.csv") == slurp(dir.path / "reloaded/effects.csv"));
}

TEST_CASE("exit codes: usage 1, data 2") {
    TempDir dir("fanova_cli_errors");
    write_space(dir.path / "space.json");
    write_runs(dir.path / "runs.csv");

    // unknown flag -> CLI11 usage error
    CHECK(run("analyze --nope") == 1);
    // no subcommand
    CHECK(run("") == 1);
    // empty slice -> data error
    CHECK(run("analyze --space " + (dir.path / "space.json").string() + " --data " +
              (dir.path / "runs.csv").string() +
              " --scenario suite --dim 30 --budget 500 --engine exact --out " +
              (dir.path / "r").string()) == 2);
    // missing data file -> data error
    CHECK(run("analyze --space " + (dir.path / "space.json").string() + " --data " +
              (dir.path / "missing.csv").string() + " --out " + (dir.path / "r2").string()) == 2);
    // --save-model with the exact engine -> usage error
    CHECK(run("analyze --space " + (dir.path / "space.json").string() + " --data " +
              (dir.path / "runs.csv").string() +
              " --scenario suite --dim 5 --budget 500 --engine exact --save-model " +
              (dir.path / "m.json").string() + " --out " + (dir.path / "r3").string()) == 1);
    // failed analyze leaves no partial reports behind
    CHECK(!fs::exists(dir.path / "r/effects.csv"));
}

TEST_CASE("the --exact preset matches the exact engine") {
    TempDir dir("fanova_cli_exact");
    write_space(dir.path / "space.json");
    write_truth(dir.path / "truth.json");
    REQUIRE(run("synth --space " + (dir.path / "space.json").string() + " --truth " +
                (dir.path / "truth.json").string() + " --seed 0 --out " + dir.path.string()) == 0);
    const std::string analyze_base =
        "analyze --space " + (dir.path / "space.json").string() + " --data " +
        (dir.path / "dataset.csv").string() + " --max-order 2 --out ";
    REQUIRE(run(analyze_base + (dir.path / "forest").string() + " --exact") == 0);
    REQUIRE(run(analyze_base + (dir.path / "oracle").string() + " --engine exact") == 0);
    CHECK(slurp(dir.path / "forest/effects.csv") == slurp(dir.path / "oracle/effects.csv"));
}

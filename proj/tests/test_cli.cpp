#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "optliq/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string g_binary;

int run(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("optliq_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::map<std::string, std::string> dir_contents(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir))
        out[entry.path().filename().string()] = optliq::read_file(entry.path().string());
    return out;
}

}  // namespace

TEST_CASE("usage errors") {
    CHECK(run("") == 2);                  // missing subcommand
    CHECK(run("frobnicate") == 2);        // unknown subcommand
    CHECK(run("--help") == 0);
    CHECK(run("solve --config /nonexistent/config.json") == 2);
}

TEST_CASE("calibrate writes reports and re-runs bit-identically") {
    const auto dir = fresh_dir("calibrate");
    const std::string args = "calibrate --out " + dir.string();
    REQUIRE(run(args) == 0);
    for (const char* name :
         {"calibration_under.json", "calibration_over.json",
          "calibration_average.json", "curve_under.csv", "market.json",
          "calibrate_manifest.json"})
        CHECK(fs::exists(dir / name));

    const auto first = dir_contents(dir);
    REQUIRE(run(args) == 0);
    const auto second = dir_contents(dir);
    CHECK(first == second);

    const auto only = fresh_dir("calibrate_under");
    REQUIRE(run("calibrate --scenario under --out " + only.string()) == 0);
    CHECK(fs::exists(only / "calibration_under.json"));
    CHECK(!fs::exists(only / "calibration_over.json"));
    CHECK(run("calibrate --scenario bogus --out " + only.string()) == 2);
}

TEST_CASE("solve, simulate with a numeric path, and verify-style configs") {
    const auto dir = fresh_dir("solve");
    const auto cfg_path = dir / "config.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"json({
  "out": ")json" << dir.string() << R"json(",
  "solve": {
    "grid": {"n_t": 40, "n_s": 6, "n_q": 20},
    "runs": [
      {"label": "LL",
       "tpi": {"kind": "linear", "p0": 0.00079754, "p1": 0.00066177},
       "ppi": {"kind": "linear", "p0": 0.00095264, "p1": 0.0}}
    ]
  },
  "simulate": {
    "upsilon": 800.0, "tau": 5.0, "horizon": 200.0,
    "strategies": [
      {"kind": "parametric", "d2": 1.0, "label": "PI(1)"},
      {"kind": "parametric", "d2": 3.0, "label": "PI(3)"},
      {"kind": "numeric", "path_csv": ")json" << (dir / "path_LL.csv").string() << R"json(",
       "label": "LL"}
    ],
    "synthetic": {"level_qty": 120.0, "depth": 30, "steps": 40,
                  "drift_per_step": 0.001}
  }
})json";
    }
    const std::string base = " --config " + cfg_path.string();
    REQUIRE(run("solve" + base) == 0);
    CHECK(fs::exists(dir / "surface_LL.csv"));
    CHECK(fs::exists(dir / "policy_LL.csv"));
    CHECK(fs::exists(dir / "path_LL.csv"));
    {
        std::ifstream path_csv(dir / "path_LL.csv");
        std::string header;
        std::getline(path_csv, header);
        CHECK(header == "t,nu,q");
    }

    // solve output feeds the simulate command as a numeric strategy
    REQUIRE(run("simulate" + base) == 0);
    CHECK(fs::exists(dir / "ranking.csv"));
    {
        std::ifstream ranking(dir / "ranking.csv");
        std::string line;
        int rows = 0;
        while (std::getline(ranking, line)) ++rows;
        CHECK(rows == 4);  // header + 3 strategies
    }

    // bit-identical simulate re-run
    const auto report_before = optliq::read_file((dir / "simulate_reports.json").string());
    REQUIRE(run("simulate" + base) == 0);
    CHECK(optliq::read_file((dir / "simulate_reports.json").string()) == report_before);

    // label filter drops the others
    REQUIRE(run("simulate --strategy 'PI(1)'" + base) == 0);
    {
        std::ifstream ranking(dir / "ranking.csv");
        std::string line;
        int rows = 0;
        while (std::getline(ranking, line)) ++rows;
        CHECK(rows == 2);
    }
    CHECK(run("simulate --strategy NOPE" + base) == 2);

    // sweep flag produces the csv
    REQUIRE(run("simulate --d2-sweep 0.5:2:0.5" + base) == 0);
    CHECK(fs::exists(dir / "d2_sweep.csv"));
    {
        std::ifstream sweep(dir / "d2_sweep.csv");
        std::string line;
        int rows = 0;
        while (std::getline(sweep, line)) ++rows;
        CHECK(rows == 5);  // header + d2 in {0.5, 1, 1.5, 2}
    }
    CHECK(run("simulate --d2-sweep nonsense" + base) == 2);

    // invalid grid is a configuration error
    const auto bad_path = dir / "bad.json";
    {
        std::ofstream bad(bad_path);
        bad << R"json({"solve": {"grid": {"n_s": 1}}, "out": ")json" << dir.string()
            << R"json("})json";
    }
    CHECK(run("solve --config " + bad_path.string()) == 2);

    // missing snapshot file
    const auto missing = dir / "missing.json";
    {
        std::ofstream miss(missing);
        miss << R"json({"snapshots": "/nonexistent/books.jsonl", "out": ")json"
             << dir.string() << R"json("})json";
    }
    CHECK(run("calibrate --config " + missing.string()) == 2);
}

int main(int argc, char** argv) {
    doctest::Context context;
    context.applyCommandLine(1, argv);
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <optliq-binary>\n");
        return 1;
    }
    g_binary = argv[1];
    return context.run();
}

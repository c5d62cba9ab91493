#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hwdd/reference.hpp"
#include "hwdd/runio.hpp"
#include "hwdd/yield.hpp"

using namespace hwdd;
namespace fs = std::filesystem;

namespace {

const std::string kCli = HWDD_CLI_PATH;

int runCli(const std::string& args, std::string* output = nullptr) {
    const std::string tmp = "cli_out_tmp.txt";
    const int rc = std::system((kCli + " " + args + " > " + tmp + " 2>&1").c_str());
    if (output) {
        std::ifstream in(tmp);
        std::stringstream ss;
        ss << in.rdbuf();
        *output = ss.str();
    }
    std::remove(tmp.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeFile(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

// Elastic-only schedule on a small cube; k = 0.75 Table-1 material.
std::string cubeConfig(const std::string& extraData, const std::string& schedule) {
    return std::string(R"({
      "material": {"E": 3e10, "nu": 0.2, "H": 2.5e9, "sigma0": 3e8, "h": 2, "k": 0.75},
      "mesh": {"kind": "cube", "nx": 2, "ny": 1, "nz": 1, "order": 1},
      "schedule": )") +
           schedule + R"(,
      "bc": {"dirichlet": [
        {"face": "x=min", "dofs": "x", "value": 0.0},
        {"face": "y=min", "dofs": "y", "value": 0.0},
        {"face": "z=min", "dofs": "z", "value": 0.0},
        {"face": "x=max", "dofs": "x", "value": 1.0, "driven": true}
      ]},
      "data": {"n1": 30, "n2": 60, "n_p": 2, "seed": 11, "interpolation": "spline",
               "eps_max": 0.015)" +
           extraData + R"(}
    })";
}

}  // namespace

TEST_CASE("gen-data writes valid, reproducible files") {
    const fs::path dir = fs::temp_directory_path() / "hwdd_cli_gen";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "config.json";
    writeFile(cfg, cubeConfig("", R"({"segments": [{"target": 1e-4, "steps": 2}]})"));

    std::string out;
    const int rc = runCli("gen-data --config " + cfg.string() + " --out " + dir.string(), &out);
    CHECK(rc == 0);
    CHECK(out.find("gen-data:") != std::string::npos);
    CHECK(fs::exists(dir / "yield_points.csv"));
    CHECK(fs::exists(dir / "tensile.csv"));
    CHECK(fs::exists(dir / "extended.csv"));

    // Every yield point satisfies the criterion at sigma_y(0).
    const ReferenceMaterial mat{3e10, 0.2, 2.5e9, 3e8, 2.0, 0.75};
    const double sy0 = sigmaY(0.0, mat);
    const auto points = readYieldPointsCsv((dir / "yield_points.csv").string());
    CHECK(points.size() == 30);
    const AnalyticYield surf(mat.k, sy0);
    for (const auto& [theta, rho] : points)
        CHECK(std::abs(rho - surf.phi(theta)) <= 1e-6 * sy0);

    // Re-running with the same seed gives byte-identical files.
    const fs::path dir2 = fs::temp_directory_path() / "hwdd_cli_gen2";
    fs::remove_all(dir2);
    CHECK(runCli("gen-data --config " + cfg.string() + " --out " + dir2.string()) == 0);
    CHECK(slurp(dir / "yield_points.csv") == slurp(dir2 / "yield_points.csv"));
    CHECK(slurp(dir / "tensile.csv") == slurp(dir2 / "tensile.csv"));
    CHECK(slurp(dir / "extended.csv") == slurp(dir2 / "extended.csv"));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("elastic run: both solvers agree and compare reports a tiny RMSD") {
    const fs::path dir = fs::temp_directory_path() / "hwdd_cli_run";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path genCfg = dir / "gen.json";
    const std::string schedule = R"({"segments": [{"target": 2e-4, "steps": 3}]})";
    writeFile(genCfg, cubeConfig("", schedule));
    REQUIRE(runCli("gen-data --config " + genCfg.string() + " --out " + dir.string()) == 0);

    const fs::path runCfg = dir / "run.json";
    const std::string files = ", \"yield_file\": \"" + (dir / "yield_points.csv").string() +
                              "\", \"tensile_file\": \"" + (dir / "tensile.csv").string() + "\"";
    writeFile(runCfg, cubeConfig(files, schedule));

    std::string outA, outB, outC;
    CHECK(runCli("run --config " + runCfg.string() + " --solver datadriven --out " +
                     (dir / "dd").string(),
                 &outA) == 0);
    CHECK(runCli("run --config " + runCfg.string() + " --solver reference --out " +
                     (dir / "ref").string(),
                 &outB) == 0);
    CHECK(outA.find("summary:") != std::string::npos);
    CHECK(outB.find("summary:") != std::string::npos);

    CHECK(runCli("compare " + (dir / "dd").string() + " " + (dir / "ref").string() + " --out " +
                     (dir / "cmp").string(),
                 &outC) == 0);
    double rmsd = -1.0;
    REQUIRE(std::sscanf(outC.c_str(), "RMSD = %lf", &rmsd) == 1);
    CHECK(rmsd >= 0.0);
    CHECK(rmsd <= 1e-6);
    CHECK(fs::exists(dir / "cmp" / "error_series.csv"));

    // A run compared against itself is exactly zero.
    std::string outSelf;
    CHECK(runCli("compare " + (dir / "dd").string() + " " + (dir / "dd").string() + " --out " +
                     (dir / "cmp2").string(),
                 &outSelf) == 0);
    REQUIRE(std::sscanf(outSelf.c_str(), "RMSD = %lf", &rmsd) == 1);
    CHECK(rmsd == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("zero-load schedule produces all-zero fields") {
    const fs::path dir = fs::temp_directory_path() / "hwdd_cli_zero";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "cfg.json";
    writeFile(cfg, cubeConfig("", R"({"segments": [{"target": 0.0, "steps": 2}]})"));
    REQUIRE(runCli("run --config " + cfg.string() + " --solver reference --out " +
                   (dir / "ref").string()) == 0);
    const RunData run = readRun((dir / "ref").string());
    CHECK(run.steps == 2);
    for (const auto& stepSig : run.sig)
        for (const auto& s : stepSig) CHECK(s.norm() == 0.0);
    for (const auto& u : run.u) CHECK(u.norm() == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("compare rejects mismatched runs") {
    const fs::path dir = fs::temp_directory_path() / "hwdd_cli_mismatch";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfgA = dir / "a.json";
    const fs::path cfgB = dir / "b.json";
    writeFile(cfgA, cubeConfig("", R"({"segments": [{"target": 1e-4, "steps": 2}]})"));
    writeFile(cfgB, cubeConfig("", R"({"segments": [{"target": 1e-4, "steps": 3}]})"));
    REQUIRE(runCli("run --config " + cfgA.string() + " --solver reference --out " +
                   (dir / "A").string()) == 0);
    REQUIRE(runCli("run --config " + cfgB.string() + " --solver reference --out " +
                   (dir / "B").string()) == 0);
    std::string out;
    CHECK(runCli("compare " + (dir / "A").string() + " " + (dir / "B").string(), &out) != 0);
    CHECK(out.find("step counts differ") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("datadriven run requires data files") {
    const fs::path dir = fs::temp_directory_path() / "hwdd_cli_nodata";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "cfg.json";
    writeFile(cfg, cubeConfig("", R"({"segments": [{"target": 1e-4, "steps": 1}]})"));
    std::string out;
    CHECK(runCli("run --config " + cfg.string() + " --solver datadriven --out " +
                     (dir / "dd").string(),
                 &out) != 0);
    CHECK(out.find("gen-data") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("study command emits the grid CSV") {
    const fs::path dir = fs::temp_directory_path() / "hwdd_cli_study";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "cfg.json";
    std::string config = cubeConfig("", R"({"segments": [{"target": 5e-4, "steps": 2}]})");
    config.insert(config.rfind('}'), R"(, "study": {"n2": [10, 20], "n_p": [1], "seeds": [1, 2, 3]})");
    writeFile(cfg, config);
    std::string out;
    CHECK(runCli("study --config " + cfg.string() + " --out " + (dir / "study").string(),
                 &out) == 0);
    std::ifstream in(dir / "study" / "study.csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "n2,n_p,seed,rmsd,steps,mesh,wallclock_s");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) {
            ++rows;
            CHECK(line.find(",") != std::string::npos);
        }
    CHECK(rows == 6);
    // Per-cell error series next to the grid CSV.
    CHECK(fs::exists(dir / "study" / "errors_n2_10_np_1_seed_1.csv"));
    fs::remove_all(dir);
}

TEST_CASE("invalid configs exit nonzero") {
    const fs::path dir = fs::temp_directory_path() / "hwdd_cli_bad";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "bad.json";
    SUBCASE("unknown key") {
        writeFile(cfg, R"({"material": {"E": 3e10, "nu": 0.2, "H": 2.5e9, "sigma0": 3e8,
                          "h": 2, "k": 0.75}, "typo_key": 1})");
        std::string out;
        CHECK(runCli("gen-data --config " + cfg.string(), &out) != 0);
        CHECK(out.find("unknown key") != std::string::npos);
    }
    SUBCASE("malformed JSON") {
        writeFile(cfg, "{not json");
        CHECK(runCli("gen-data --config " + cfg.string()) != 0);
    }
    SUBCASE("missing config file") {
        CHECK(runCli("run --config /nonexistent.json --solver reference") != 0);
    }
    fs::remove_all(dir);
}

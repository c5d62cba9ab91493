// Command-line front end: data generation, data-driven and reference runs,
// run comparison, and convergence studies.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hwdd/config.hpp"
#include "hwdd/data.hpp"
#include "hwdd/dd.hpp"
#include "hwdd/metrics.hpp"
#include "hwdd/reference_solver.hpp"
#include "hwdd/runio.hpp"
#include "hwdd/yield.hpp"

namespace {

using namespace hwdd;

FittedYield fitFromPoints(const std::vector<TorsionYieldPoint>& points, InterpKind kind) {
    std::vector<std::pair<double, double>> samples;
    samples.reserve(points.size());
    for (const auto& p : points) samples.emplace_back(p.theta, p.rho);
    return FittedYield(samples, kind);
}

int cmdGenData(const std::string& configPath, std::string outDir) {
    const RunConfig config = loadConfig(configPath);
    if (!config.hasData) {
        std::cerr << "gen-data: config has no `data` section\n";
        return 1;
    }
    if (outDir.empty()) outDir = config.outputDir;
    std::filesystem::create_directories(outDir);

    const double sy0 = sigmaY(0.0, config.material);
    const auto yieldPoints =
        genTensionTorsion(config.data.n1, config.material.k, sy0, config.data.seed);
    std::vector<std::pair<double, double>> samples;
    for (const auto& p : yieldPoints) samples.emplace_back(p.theta, p.rho);
    writeYieldPointsCsv(outDir + "/yield_points.csv", samples);

    const auto records = genTensilePaths(config.data.n2, config.data.np, config.material,
                                         config.data.scaledPattern());
    writeTensileCsv(outDir + "/tensile.csv", records);

    const FittedYield surface(samples, config.data.interpolation);
    const double phi0 = surface.phi(0.0);
    const ExtendedData extended = buildExtended(records, phi0);
    writeExtendedCsv(outDir + "/extended.csv", extended);

    std::printf("gen-data: %zu yield points, %zu tensile records, %zu increments "
                "(%zu inelastic), phi(0) = %.6g Pa, seed = %llu\n",
                yieldPoints.size(), records.size(), extended.points().size(),
                extended.subsetSize(true), phi0,
                static_cast<unsigned long long>(config.data.seed));
    return 0;
}

void printSummary(const Mesh& mesh, const Eigen::VectorXd& u,
                  const std::vector<SymTensor3>& sig) {
    double maxU = 0.0;
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
        maxU = std::max(maxU, u.segment<3>(3 * static_cast<int>(n)).norm());
    double maxPrincipal = -1e300;
    for (const auto& s : sig)
        maxPrincipal = std::max(maxPrincipal, principalFrame(s).values[0]);
    std::printf("summary: max displacement = %.9g m, max principal stress = %.9g Pa\n", maxU,
                maxPrincipal);
}

int cmdRun(const std::string& configPath, const std::string& solver, std::string outDir) {
    const RunConfig config = loadConfig(configPath);
    if (!config.hasMesh || !config.hasSchedule || !config.hasBC) {
        std::cerr << "run: config needs mesh, schedule and bc sections\n";
        return 1;
    }
    if (outDir.empty()) outDir = config.outputDir;

    const Mesh mesh = buildMesh(config.mesh);
    const std::vector<double> drives = driveValues(config.schedule);

    if (solver == "reference") {
        ReferenceSolver ref(mesh, config.material);
        std::vector<double> weights;
        for (const auto& ip : ref.integrationPoints()) weights.push_back(ip.weight);
        RunWriter writer(outDir, mesh, "reference", config.material.E);
        const double sy0 = sigmaY(0.0, config.material);
        for (std::size_t t = 0; t < drives.size(); ++t) {
            try {
                ref.step(bcAt(config, mesh, drives[t]));
            } catch (const std::exception& e) {
                std::cerr << "run: reference solver failed at step " << (t + 1) << ": "
                          << e.what() << "\n";
                return 1;
            }
            std::vector<double> alphaY;
            for (const auto& ps : ref.plasticStates())
                alphaY.push_back(sigmaY(ps.epsBarP, config.material) / sy0);
            writer.writeStep(ref.displacements(), weights, ref.strains(), ref.stresses(),
                             alphaY);
        }
        writer.finish();
        printSummary(mesh, ref.displacements(), ref.stresses());
        return 0;
    }
    if (solver != "datadriven") {
        std::cerr << "run: unknown solver `" << solver << "` (datadriven|reference)\n";
        return 1;
    }

    if (!config.hasData) {
        std::cerr << "run: datadriven solver needs a `data` section\n";
        return 1;
    }
    if (config.data.yieldFile.empty() || config.data.tensileFile.empty()) {
        std::cerr << "run: datadriven solver needs data.yield_file and data.tensile_file "
                     "(generate them with gen-data)\n";
        return 1;
    }
    const auto samples = readYieldPointsCsv(config.data.yieldFile);
    const FittedYield surface(samples, config.data.interpolation);
    const auto records = readTensileCsv(config.data.tensileFile);
    const ExtendedData extended = buildExtended(records, surface.phi(0.0));

    DDSolver dd(mesh, surface, extended, config.material.lambda(), config.material.mu());
    std::vector<double> weights;
    for (const auto& ip : dd.integrationPoints()) weights.push_back(ip.weight);
    RunWriter writer(outDir, mesh, "datadriven", config.material.E);
    for (std::size_t t = 0; t < drives.size(); ++t) {
        try {
            dd.step(bcAt(config, mesh, drives[t]));
        } catch (const std::exception& e) {
            std::cerr << "run: data-driven solver failed at step " << (t + 1) << ": " << e.what()
                      << "\n";
            return 1;
        }
        std::vector<SymTensor3> eps, sig;
        std::vector<double> alphaY;
        for (const auto& s : dd.states()) {
            eps.push_back(s.eps);
            sig.push_back(s.sig);
            alphaY.push_back(s.alphaY);
        }
        writer.writeStep(dd.displacements(), weights, eps, sig, alphaY);
    }
    writer.finish();
    std::vector<SymTensor3> sig;
    for (const auto& s : dd.states()) sig.push_back(s.sig);
    printSummary(mesh, dd.displacements(), sig);
    return 0;
}

int cmdCompare(const std::string& dirA, const std::string& dirB, std::string outDir) {
    const RunData a = readRun(dirA);
    const RunData b = readRun(dirB);
    if (a.steps != b.steps) {
        std::cerr << "compare: step counts differ (" << a.steps << " vs " << b.steps << ")\n";
        return 1;
    }
    if (a.weights.size() != b.weights.size()) {
        std::cerr << "compare: integration-point layouts differ\n";
        return 1;
    }
    for (std::size_t i = 0; i < a.weights.size(); ++i)
        if (std::abs(a.weights[i] - b.weights[i]) > 1e-9 * std::abs(b.weights[i])) {
            std::cerr << "compare: integration-point weights differ at point " << i << "\n";
            return 1;
        }

    std::vector<double> perStep;
    for (int t = 0; t < a.steps; ++t)
        perStep.push_back(
            stepError(a.eps[t], a.sig[t], b.eps[t], b.sig[t], a.weights, a.youngsModulus));
    const double rmsd = rmsdOf(perStep);
    if (outDir.empty()) outDir = ".";
    std::filesystem::create_directories(outDir);
    writeErrorSeriesCsv(outDir + "/error_series.csv", perStep);
    std::printf("RMSD = %.12g over %d steps\n", rmsd, a.steps);
    return 0;
}

int cmdStudy(const std::string& configPath, std::string outDir) {
    const RunConfig config = loadConfig(configPath);
    if (!config.study) {
        std::cerr << "study: config has no `study` section\n";
        return 1;
    }
    if (outDir.empty()) outDir = config.outputDir;
    std::filesystem::create_directories(outDir);

    const std::vector<StudyRow> rows = runStudy(config);
    writeStudyCsv(outDir + "/study.csv", rows);
    bool anyFailed = false;
    for (const auto& row : rows) {
        char name[128];
        std::snprintf(name, sizeof(name), "errors_n2_%d_np_%d_seed_%llu.csv", row.n2, row.np,
                      static_cast<unsigned long long>(row.seed));
        if (!row.failed) writeErrorSeriesCsv(outDir + "/" + name, row.perStep);
        std::printf("cell n2=%d n_p=%d seed=%llu: %s%s\n", row.n2, row.np,
                    static_cast<unsigned long long>(row.seed),
                    row.failed ? "FAILED " : "ok, rmsd = ",
                    row.failed ? row.error.c_str() : std::to_string(row.rmsd).c_str());
        anyFailed |= row.failed;
    }
    return anyFailed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven elasto-plasticity in Haigh-Westergaard coordinates"};
    app.require_subcommand(1);

    std::string configPath, solver = "datadriven", outDir, dirA, dirB;

    CLI::App* genData = app.add_subcommand("gen-data", "generate synthetic measurement data");
    genData->add_option("--config", configPath, "run config (JSON)")->required();
    genData->add_option("--out", outDir, "output directory");

    CLI::App* run = app.add_subcommand("run", "solve the boundary value problem");
    run->add_option("--config", configPath, "run config (JSON)")->required();
    run->add_option("--solver", solver, "datadriven|reference");
    run->add_option("--out", outDir, "output directory");

    CLI::App* compare = app.add_subcommand("compare", "RMSD between two runs");
    compare->add_option("runA", dirA, "first run directory")->required();
    compare->add_option("runB", dirB, "second run directory")->required();
    compare->add_option("--out", outDir, "output directory for the error series");

    CLI::App* study = app.add_subcommand("study", "convergence study over (n2, n_p) grid");
    study->add_option("--config", configPath, "run config (JSON)")->required();
    study->add_option("--out", outDir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (genData->parsed()) return cmdGenData(configPath, outDir);
        if (run->parsed()) return cmdRun(configPath, solver, outDir);
        if (compare->parsed()) return cmdCompare(dirA, dirB, outDir);
        if (study->parsed()) return cmdStudy(configPath, outDir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

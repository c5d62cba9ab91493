#include "hwdd/metrics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "hwdd/dd.hpp"
#include "hwdd/parallel.hpp"
#include "hwdd/reference_solver.hpp"

namespace hwdd {

double stepError(const std::vector<SymTensor3>& eps, const std::vector<SymTensor3>& sig,
                 const std::vector<SymTensor3>& epsRef, const std::vector<SymTensor3>& sigRef,
                 const std::vector<double>& weights, double E) {
    const std::size_t m = weights.size();
    if (eps.size() != m || sig.size() != m || epsRef.size() != m || sigRef.size() != m)
        throw std::invalid_argument("stepError: integration-point layouts do not match");
    if (E <= 0.0) throw std::invalid_argument("stepError: E must be positive");

    auto normSq = [E](const SymTensor3& e, const SymTensor3& s) {
        return 0.5 * E * e.ddot(e) + 0.5 / E * s.ddot(s);
    };
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        num += weights[i] * normSq(eps[i] - epsRef[i], sig[i] - sigRef[i]);
        den += weights[i] * normSq(epsRef[i], sigRef[i]);
    }
    if (den <= 0.0) throw std::invalid_argument("stepError: reference solution has zero norm");
    return std::sqrt(num / den);
}

double rmsdOf(const std::vector<double>& perStepErrors) {
    if (perStepErrors.empty()) throw std::invalid_argument("rmsdOf: empty error series");
    double sum = 0.0;
    for (const double e : perStepErrors) sum += e * e;
    return std::sqrt(sum / static_cast<double>(perStepErrors.size()));
}

std::vector<StudyRow> runStudy(const RunConfig& config) {
    if (!config.study) throw std::invalid_argument("runStudy: config has no study section");
    if (!config.hasMesh || !config.hasSchedule || !config.hasBC || !config.hasData)
        throw std::invalid_argument("runStudy: config needs mesh, schedule, bc and data");

    const Mesh mesh = buildMesh(config.mesh);
    const std::vector<double> drives = driveValues(config.schedule);
    const std::string meshName = config.mesh.describe();
    const ReferenceMaterial& mat = config.material;

    // Shared reference solution: one trajectory per mesh/schedule.
    std::vector<std::vector<SymTensor3>> refEps, refSig;
    std::vector<double> weights;
    {
        ReferenceSolver ref(mesh, mat);
        for (const auto& ip : ref.integrationPoints()) weights.push_back(ip.weight);
        for (const double d : drives) {
            ref.step(bcAt(config, mesh, d));
            refEps.push_back(ref.strains());
            refSig.push_back(ref.stresses());
        }
    }

    const StudySpec& study = *config.study;
    struct Cell {
        int n2, np;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const int n2 : study.n2)
        for (const int np : study.np)
            for (const std::uint64_t seed : study.seeds) cells.push_back({n2, np, seed});

    std::vector<StudyRow> rows(cells.size());
    parallelFor(cells.size(), [&](std::size_t c) {
        const Cell& cell = cells[c];
        StudyRow& row = rows[c];
        row.n2 = cell.n2;
        row.np = cell.np;
        row.seed = cell.seed;
        row.steps = static_cast<int>(drives.size());
        row.mesh = meshName;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const double sy0 = sigmaY(0.0, mat);
            const auto yieldPoints = genTensionTorsion(config.data.n1, mat.k, sy0, cell.seed);
            std::vector<std::pair<double, double>> samples;
            for (const auto& p : yieldPoints) samples.emplace_back(p.theta, p.rho);
            const FittedYield surface(samples, config.data.interpolation);

            DataSpec dataSpec = config.data;
            dataSpec.n2 = cell.n2;
            dataSpec.np = cell.np;
            const auto records =
                genTensilePaths(dataSpec.n2, dataSpec.np, mat, dataSpec.scaledPattern());
            const ExtendedData extended = buildExtended(records, surface.phi(0.0));

            DDSolver dd(mesh, surface, extended, mat.lambda(), mat.mu());
            row.perStep.reserve(drives.size());
            for (std::size_t t = 0; t < drives.size(); ++t) {
                dd.step(bcAt(config, mesh, drives[t]));
                std::vector<SymTensor3> eps, sig;
                eps.reserve(dd.states().size());
                sig.reserve(dd.states().size());
                for (const auto& s : dd.states()) {
                    eps.push_back(s.eps);
                    sig.push_back(s.sig);
                }
                row.perStep.push_back(stepError(eps, sig, refEps[t], refSig[t], weights, mat.E));
            }
            row.rmsd = rmsdOf(row.perStep);
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
            row.rmsd = std::numeric_limits<double>::quiet_NaN();
        }
        row.wallclockSeconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    return rows;
}

void writeStudyCsv(const std::string& path, const std::vector<StudyRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write study file: " + path);
    out << "n2,n_p,seed,rmsd,steps,mesh,wallclock_s\n";
    char buf[240];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%llu,%.17g,%d,%s,%.3f\n", r.n2, r.np,
                      static_cast<unsigned long long>(r.seed), r.rmsd, r.steps, r.mesh.c_str(),
                      r.wallclockSeconds);
        out << buf;
    }
}

void writeErrorSeriesCsv(const std::string& path, const std::vector<double>& perStep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write error series: " + path);
    out << "step,error\n";
    char buf[64];
    for (std::size_t i = 0; i < perStep.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, perStep[i]);
        out << buf;
    }
}

}  // namespace hwdd

#include "hwdd/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hwdd/yield.hpp"

namespace hwdd {

namespace {

// Deterministic uniform double in [0, 1) from the raw generator bits; the
// standard distribution objects are implementation-defined.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<TorsionYieldPoint> genTensionTorsion(int n1, double k, double sigmaY0,
                                                 std::uint64_t seed) {
    if (n1 < 2) throw std::invalid_argument("genTensionTorsion: need at least 2 points");
    if (k <= 0.0 || sigmaY0 <= 0.0)
        throw std::invalid_argument("genTensionTorsion: invalid surface parameters");

    std::mt19937_64 rng(seed);
    std::vector<TorsionYieldPoint> out;
    out.reserve(static_cast<std::size_t>(n1));

    const double tol = 1e-12 * sigmaY0;
    while (out.size() < static_cast<std::size_t>(n1)) {
        bool found = false;
        for (int attempt = 0; attempt < 32 && !found; ++attempt) {
            const double s11 = -sigmaY0 + uniform01(rng) * (k * sigmaY0 + sigmaY0);
            auto overshoot = [&](double s23) {
                TorsionYieldPoint p;
                p.sig11 = s11;
                p.sig23 = s23;
                return yieldF(p.stress(), k) - sigmaY0;
            };
            // F is below the yield level at s23 = 0 for s11 inside the drawn
            // range, and grows without bound in s23; bracket then bisect.
            double lo = 0.0;
            double hi = 2.0 * k * sigmaY0 / (std::sqrt(3.0) * (1.0 + k));
            int expand = 0;
            while (overshoot(hi) < 0.0 && expand++ < 60) hi *= 2.0;
            if (overshoot(hi) < 0.0) continue;  // resample
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (overshoot(mid) < 0.0)
                    lo = mid;
                else
                    hi = mid;
                if (std::abs(overshoot(hi)) <= tol) break;
            }
            TorsionYieldPoint p;
            p.sig11 = s11;
            p.sig23 = hi;
            if (std::abs(yieldF(p.stress(), k) - sigmaY0) > 1e-6 * sigmaY0) continue;
            const HWCoords hw = haighWestergaard(p.stress());
            p.theta = foldTheta(hw.theta);
            p.rho = hw.rho;
            out.push_back(p);
            found = true;
        }
        if (!found)
            throw std::runtime_error("genTensionTorsion: root solve failed repeatedly");
    }
    return out;
}

std::vector<TensileRecord> genTensilePaths(int n2, int np, const ReferenceMaterial& mat,
                                           const LoadingSpec& loading) {
    if (n2 < 2) throw std::invalid_argument("genTensilePaths: need at least 2 records per path");
    if (np < 1) throw std::invalid_argument("genTensilePaths: need at least 1 path");
    if (loading.empty()) throw std::invalid_argument("genTensilePaths: empty loading spec");
    mat.validate();
    for (const auto& seg : loading)
        if (seg.steps < 1)
            throw std::invalid_argument("genTensilePaths: segment needs at least 1 step");

    // Pattern as a piecewise-linear function of pseudo-time in [0, 1];
    // segment durations are proportional to their step counts.
    int totalSteps = 0;
    for (const auto& seg : loading) totalSteps += seg.steps;
    auto patternAt = [&](double tau) {
        double t0 = 0.0, v0 = 0.0;
        for (const auto& seg : loading) {
            const double t1 = t0 + static_cast<double>(seg.steps) / totalSteps;
            if (tau <= t1 + 1e-15) {
                const double w = (tau - t0) / (t1 - t0);
                return v0 + w * (seg.target - v0);
            }
            t0 = t1;
            v0 = seg.target;
        }
        return loading.back().target;
    };

    std::vector<TensileRecord> out;
    out.reserve(static_cast<std::size_t>(n2) * np);
    for (int j = 0; j < np; ++j) {
        const double scale = static_cast<double>(j + 1) / np;
        std::vector<double> eps(n2);
        for (int i = 0; i < n2; ++i)
            eps[i] = scale * patternAt(static_cast<double>(i) / (n2 - 1));
        const std::vector<UniaxialStep> steps = driveUniaxial(eps, mat);
        for (int i = 0; i < n2; ++i) {
            TensileRecord rec;
            rec.path = j;
            rec.step = i;
            rec.eps11 = steps[i].eps11;
            rec.eps22 = steps[i].eps22;
            rec.sig11 = steps[i].sig11;
            out.push_back(rec);
        }
    }
    return out;
}

ExtendedData::ExtendedData(std::vector<ExtDataPoint> points) : points_(std::move(points)) {
    auto order = [this](std::size_t a, std::size_t b) {
        const ExtDataPoint& pa = points_[a];
        const ExtDataPoint& pb = points_[b];
        if (pa.alpha != pb.alpha) return pa.alpha < pb.alpha;
        if (pa.path != pb.path) return pa.path < pb.path;
        return pa.step < pb.step;
    };
    for (std::size_t i = 0; i < points_.size(); ++i)
        (points_[i].inelastic ? inelastic_ : elastic_).push_back(i);
    std::sort(elastic_.begin(), elastic_.end(), order);
    std::sort(inelastic_.begin(), inelastic_.end(), order);
}

std::size_t ExtendedData::subsetSize(bool inelastic) const {
    return inelastic ? inelastic_.size() : elastic_.size();
}

const ExtDataPoint& ExtendedData::nearestByAlpha(double alpha, bool inelastic) const {
    const std::vector<std::size_t>& idx = inelastic ? inelastic_ : elastic_;
    if (idx.empty())
        throw std::runtime_error(
            "nearestByAlpha: no admissible data in the requested subset (coverage hole)");

    auto alphaOf = [this, &idx](std::size_t pos) { return points_[idx[pos]].alpha; };
    // First entry with alpha_i >= alpha.
    std::size_t lo = 0, hi = idx.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (alphaOf(mid) < alpha)
            lo = mid + 1;
        else
            hi = mid;
    }

    // Candidates: the lead entry of the value run at/above alpha and the lead
    // entry of the run below. Run leads carry the lowest (path, step) because
    // of the sort order.
    auto runLead = [&](std::size_t pos) {
        const double v = alphaOf(pos);
        std::size_t a = 0, b = pos;
        while (a < b) {
            const std::size_t mid = (a + b) / 2;
            if (alphaOf(mid) < v)
                a = mid + 1;
            else
                b = mid;
        }
        return a;
    };

    const ExtDataPoint* best = nullptr;
    double bestDist = 0.0;
    auto consider = [&](std::size_t pos) {
        const ExtDataPoint& p = points_[idx[pos]];
        const double d = std::abs(alpha - p.alpha);
        if (best == nullptr || d < bestDist ||
            (d == bestDist && (p.path < best->path ||
                               (p.path == best->path && p.step < best->step)))) {
            best = &p;
            bestDist = d;
        }
    };
    if (lo < idx.size()) consider(runLead(lo));
    if (lo > 0) consider(runLead(lo - 1));
    return *best;
}

ExtendedData buildExtended(const std::vector<TensileRecord>& records, double phi0) {
    if (phi0 <= 0.0) throw std::invalid_argument("buildExtended: phi(0) must be positive");

    // Group by path, keeping the order of records within each path.
    std::vector<int> paths;
    for (const auto& r : records)
        if (paths.empty() || paths.back() != r.path) paths.push_back(r.path);

    std::vector<ExtDataPoint> out;
    const double c = std::sqrt(2.0 / 3.0);
    for (const int pid : paths) {
        const TensileRecord* prev = nullptr;
        double runningMax = 1.0;  // initial yield surface
        for (const auto& r : records) {
            if (r.path != pid) continue;
            if (prev != nullptr) {
                if (r.step <= prev->step)
                    throw std::invalid_argument("buildExtended: step indices must increase");
                ExtDataPoint p;
                p.dEps = r.strain() - prev->strain();
                p.dSig = r.stress() - prev->stress();
                p.alpha = c * std::abs(r.sig11) / phi0;
                p.path = r.path;
                p.step = r.step;
                // Tolerance absorbs association roundoff when a record sits
                // exactly on the current yield level.
                if (p.alpha > runningMax * (1.0 + 1e-12)) {
                    p.inelastic = true;
                    runningMax = p.alpha;
                }
                out.push_back(p);
            }
            prev = &r;
        }
    }
    return ExtendedData(std::move(out));
}

void writeTensileCsv(const std::string& path, const std::vector<TensileRecord>& records) {
    std::ofstream outFile(path);
    if (!outFile) throw std::runtime_error("cannot write tensile file: " + path);
    outFile << "path,step,eps11,eps22,sig11\n";
    char buf[160];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n", r.path, r.step, r.eps11,
                      r.eps22, r.sig11);
        outFile << buf;
    }
}

std::vector<TensileRecord> readTensileCsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tensile file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("path,step,eps11,eps22,sig11", 0) != 0)
        throw std::runtime_error("tensile file missing expected header: " + path);
    std::vector<TensileRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TensileRecord r;
        char c;
        std::istringstream ss(line);
        if (!(ss >> r.path >> c >> r.step >> c >> r.eps11 >> c >> r.eps22 >> c >> r.sig11))
            throw std::runtime_error("malformed tensile line: " + line);
        out.push_back(r);
    }
    return out;
}

void writeExtendedCsv(const std::string& path, const ExtendedData& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write extended-set file: " + path);
    out << "path,step,deps11,deps22,dsig11,alpha,subset\n";
    char buf[200];
    for (const auto& p : data.points()) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%s\n", p.path, p.step,
                      p.dEps[kSym11], p.dEps[kSym22], p.dSig[kSym11], p.alpha,
                      p.inelastic ? "inelastic" : "elastic");
        out << buf;
    }
}

}  // namespace hwdd

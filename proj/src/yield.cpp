#include "hwdd/yield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hwdd {

namespace {
constexpr double kSector = M_PI / 3.0;
constexpr double kPhiFactor = 0.6123724356957945;  // sqrt(3) / (2 sqrt(2))

// Folding with the reflection sign needed for derivatives.
std::pair<double, double> foldWithSign(double theta) {
    double t = std::fmod(theta, 2.0 * kSector);
    if (t < 0.0) t += 2.0 * kSector;
    if (t > kSector) return {2.0 * kSector - t, -1.0};
    return {t, 1.0};
}
}  // namespace

double foldTheta(double theta) {
    return foldWithSign(theta).first;
}

InterpKind parseInterpKind(const std::string& name) {
    if (name == "spline") return InterpKind::Spline;
    if (name == "linear") return InterpKind::Linear;
    if (name == "nearest") return InterpKind::Nearest;
    throw std::invalid_argument("unknown interpolation kind: " + name);
}

std::string interpKindName(InterpKind kind) {
    switch (kind) {
        case InterpKind::Spline: return "spline";
        case InterpKind::Linear: return "linear";
        case InterpKind::Nearest: return "nearest";
    }
    return "?";
}

AnalyticYield::AnalyticYield(double k, double sigmaY0) : k_(k), sigmaY0_(sigmaY0) {
    if (k <= 0.0) throw std::invalid_argument("AnalyticYield: k must be positive");
    if (sigmaY0 <= 0.0) throw std::invalid_argument("AnalyticYield: sigma_y0 must be positive");
}

double AnalyticYield::phi(double theta) const {
    const double t = foldTheta(theta);
    const double g = 1.0 + 1.0 / k_ - (1.0 - 1.0 / k_) * std::cos(3.0 * t);
    return sigmaY0_ / (kPhiFactor * g);
}

double AnalyticYield::phiPrime(double theta) const {
    const auto [t, sign] = foldWithSign(theta);
    const double g = 1.0 + 1.0 / k_ - (1.0 - 1.0 / k_) * std::cos(3.0 * t);
    const double gPrime = 3.0 * (1.0 - 1.0 / k_) * std::sin(3.0 * t);
    return sign * (-sigmaY0_ * gPrime / (kPhiFactor * g * g));
}

FittedYield::FittedYield(std::vector<std::pair<double, double>> points, InterpKind kind)
    : kind_(kind) {
    if (points.size() < 2)
        throw std::invalid_argument("FittedYield: at least 2 sample points required");
    std::sort(points.begin(), points.end());
    const double eps = 1e-12;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& [t, r] = points[i];
        if (t < -eps || t > kSector + eps)
            throw std::invalid_argument("FittedYield: theta sample outside [0, pi/3]");
        if (i > 0 && t - points[i - 1].first < eps)
            throw std::invalid_argument("FittedYield: duplicate theta samples");
        theta_.push_back(std::clamp(t, 0.0, kSector));
        rho_.push_back(r);
    }

    if (kind_ == InterpKind::Spline) {
        // Clamped cubic spline: solve the tridiagonal moment system with
        // end slopes fixed to zero.
        const std::size_t n = theta_.size();
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = theta_[i + 1] - theta_[i];

        std::vector<double> a(n), b(n), c(n), d(n);
        b[0] = 2.0 * h[0];
        c[0] = h[0];
        d[0] = 6.0 * ((rho_[1] - rho_[0]) / h[0]);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            a[i] = h[i - 1];
            b[i] = 2.0 * (h[i - 1] + h[i]);
            c[i] = h[i];
            d[i] = 6.0 * ((rho_[i + 1] - rho_[i]) / h[i] - (rho_[i] - rho_[i - 1]) / h[i - 1]);
        }
        a[n - 1] = h[n - 2];
        b[n - 1] = 2.0 * h[n - 2];
        d[n - 1] = 6.0 * (-(rho_[n - 1] - rho_[n - 2]) / h[n - 2]);

        // Thomas algorithm.
        for (std::size_t i = 1; i < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        moment_.assign(n, 0.0);
        moment_[n - 1] = d[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) moment_[i] = (d[i] - c[i] * moment_[i + 1]) / b[i];
    }

    for (int i = 0; i <= 256; ++i) {
        if (evalInSector(kSector * i / 256.0) <= 0.0)
            throw std::invalid_argument("FittedYield: interpolant not positive on [0, pi/3]");
    }
}

std::size_t FittedYield::segmentOf(double t) const {
    auto it = std::upper_bound(theta_.begin(), theta_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - theta_.begin());
    if (i == 0) return 0;
    if (i >= theta_.size()) return theta_.size() - 2;
    return i - 1;
}

double FittedYield::evalInSector(double t) const {
    if (kind_ == InterpKind::Nearest) {
        std::size_t best = 0;
        double bestDist = std::abs(t - theta_[0]);
        for (std::size_t i = 1; i < theta_.size(); ++i) {
            const double dist = std::abs(t - theta_[i]);
            if (dist < bestDist) {
                best = i;
                bestDist = dist;
            }
        }
        return rho_[best];
    }
    if (t <= theta_.front()) return rho_.front();
    if (t >= theta_.back()) return rho_.back();
    const std::size_t i = segmentOf(t);
    const double h = theta_[i + 1] - theta_[i];
    if (kind_ == InterpKind::Linear)
        return rho_[i] + (rho_[i + 1] - rho_[i]) * (t - theta_[i]) / h;
    const double A = (theta_[i + 1] - t) / h;
    const double B = (t - theta_[i]) / h;
    return A * rho_[i] + B * rho_[i + 1] +
           ((A * A * A - A) * moment_[i] + (B * B * B - B) * moment_[i + 1]) * h * h / 6.0;
}

double FittedYield::evalPrimeInSector(double t) const {
    if (kind_ == InterpKind::Nearest) return 0.0;
    if (kind_ == InterpKind::Linear) {
        if (t < theta_.front() || t > theta_.back()) return 0.0;
        const std::size_t i = segmentOf(t);
        return (rho_[i + 1] - rho_[i]) / (theta_[i + 1] - theta_[i]);
    }
    if (t <= theta_.front() || t >= theta_.back()) return 0.0;
    const std::size_t i = segmentOf(t);
    const double h = theta_[i + 1] - theta_[i];
    const double A = (theta_[i + 1] - t) / h;
    const double B = (t - theta_[i]) / h;
    return (rho_[i + 1] - rho_[i]) / h +
           ((1.0 - 3.0 * A * A) * moment_[i] + (3.0 * B * B - 1.0) * moment_[i + 1]) * h / 6.0;
}

double FittedYield::phi(double theta) const {
    return evalInSector(foldTheta(theta));
}

double FittedYield::phiPrime(double theta) const {
    const auto [t, sign] = foldWithSign(theta);
    return sign * evalPrimeInSector(t);
}

double comparisonStress(const SymTensor3& sigma, const YieldSurface& surface) {
    const HWCoords hw = haighWestergaard(sigma);
    if (hw.degenerate) return 0.0;
    return hw.rho / surface.phi(hw.theta);
}

Eigen::Vector3d normalOctahedral(double theta, double rho, double rhoPrime,
                                 const Eigen::Vector3d& sPrincipal) {
    if (rho <= 0.0)
        throw std::domain_error("normalOctahedral: degenerate Lode angle, no normal exists");
    const double scale = 1.0 / std::sqrt(rho * rho + rhoPrime * rhoPrime);
    Eigen::Vector3d trig(std::sin(theta), -std::cos(M_PI / 6.0 - theta),
                         std::cos(M_PI / 6.0 + theta));
    return scale * (sPrincipal + std::sqrt(2.0 / 3.0) * rhoPrime * trig);
}

SymTensor3 normalCartesian(const Eigen::Vector3d& nHat, const PrincipalFrame& frame) {
    const Eigen::Matrix3d n =
        frame.rotation * nHat.asDiagonal() * frame.rotation.transpose();
    return SymTensor3::fromFull(n);
}

std::vector<std::pair<double, double>> readYieldPointsCsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open yield-point file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("theta,rho", 0) != 0)
        throw std::runtime_error("yield-point file missing `theta,rho` header: " + path);
    std::vector<std::pair<double, double>> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double t, r;
        char comma;
        if (!(ss >> t >> comma >> r))
            throw std::runtime_error("malformed yield-point line: " + line);
        points.emplace_back(t, r);
    }
    return points;
}

void writeYieldPointsCsv(const std::string& path,
                         const std::vector<std::pair<double, double>>& points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write yield-point file: " + path);
    out << "theta,rho\n";
    char buf[80];
    for (const auto& [t, r] : points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, r);
        out << buf;
    }
}

}  // namespace hwdd

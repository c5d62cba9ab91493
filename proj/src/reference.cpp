#include "hwdd/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hwdd {

namespace {

constexpr double kHardeningPrefactor = 0.8075499102701247;  // 1 - tan(30 deg)/3

struct FCoeffs {
    double A, B;
};

FCoeffs fCoeffs(double k) {
    return {std::sqrt(3.0) * (1.0 + 1.0 / k) / 2.0, 2.25 * (1.0 - 1.0 / k)};
}

}  // namespace

void ReferenceMaterial::validate() const {
    if (E <= 0.0) throw std::invalid_argument("material: E must be positive");
    if (nu <= 0.0 || nu >= 0.5) throw std::invalid_argument("material: nu must be in (0, 0.5)");
    if (H < 0.0) throw std::invalid_argument("material: H must be non-negative");
    if (sigma0 <= 0.0) throw std::invalid_argument("material: sigma0 must be positive");
    if (h <= 0.0) throw std::invalid_argument("material: h must be positive");
    if (k <= 0.0) throw std::invalid_argument("material: k must be positive");
}

double sigmaY(double epsBarP, const ReferenceMaterial& mat) {
    if (epsBarP < 0.0) throw std::invalid_argument("sigmaY: negative equivalent plastic strain");
    return kHardeningPrefactor * (mat.sigma0 + mat.H * std::pow(epsBarP, 1.0 / mat.h));
}

double sigmaYPrime(double epsBarP, const ReferenceMaterial& mat) {
    if (epsBarP <= 0.0) return std::numeric_limits<double>::infinity();
    return kHardeningPrefactor * mat.H / mat.h * std::pow(epsBarP, 1.0 / mat.h - 1.0);
}

double yieldF(const SymTensor3& sigma, double k) {
    const StressInvariants inv = invariants(sigma);
    if (inv.J2 <= 0.0) return 0.0;
    const auto [A, B] = fCoeffs(k);
    return A * std::sqrt(inv.J2) - B * inv.J3 / inv.J2;
}

SymTensor3 yieldFGradient(const SymTensor3& sigma, double k) {
    const StressInvariants inv = invariants(sigma);
    if (inv.J2 <= 0.0)
        throw std::domain_error("yieldFGradient: undefined for hydrostatic stress");
    const auto [A, B] = fCoeffs(k);
    const SymTensor3 s = sigma.deviator();
    const SymTensor3 devS2 = SymTensor3::fromFull(s.full() * s.full()).deviator();
    const double c1 = A / (2.0 * std::sqrt(inv.J2)) + B * inv.J3 / (inv.J2 * inv.J2);
    const double c2 = -B / inv.J2;
    return c1 * s + c2 * devS2;
}

Tensor4 yieldFHessian(const SymTensor3& sigma, double k) {
    const StressInvariants inv = invariants(sigma);
    if (inv.J2 <= 0.0)
        throw std::domain_error("yieldFHessian: undefined for hydrostatic stress");
    const auto [A, B] = fCoeffs(k);
    const double J2 = inv.J2, J3 = inv.J3;
    const SymTensor3 s = sigma.deviator();
    const SymTensor3 devS2 = SymTensor3::fromFull(s.full() * s.full()).deviator();

    const double c1 = A / (2.0 * std::sqrt(J2)) + B * J3 / (J2 * J2);
    const double c2 = -B / J2;
    const double d1 = -A / (4.0 * std::pow(J2, 1.5)) - 2.0 * B * J3 / (J2 * J2 * J2);
    const double d2 = B / (J2 * J2);

    const Tensor4 P = Tensor4::deviatoricProjector();
    Tensor4 symS = Tensor4::symProduct(s);
    // Chain through the deviatoric projector on both sides: the argument of
    // s -> dev(s^2) is itself dev(sigma).
    Tensor4 term2(P.mandel() * symS.mandel() * P.mandel());

    Tensor4 hess = c1 * P + c2 * term2 + d1 * Tensor4::outer(s, s) +
                   d2 * (Tensor4::outer(s, devS2) + Tensor4::outer(devS2, s));
    return hess;
}

namespace {

// Local return system in Mandel form: x = (sigma(6), u) with dl = u^2.
struct LocalSystem {
    const SymTensor3& sigmaTr;
    const ReferenceMaterial& mat;
    double epsBarPn;
    double scale;  // stress scale for residual norms

    Eigen::Matrix<double, 7, 1> residual(const Eigen::Matrix<double, 7, 1>& x) const {
        const SymTensor3 sig = fromMandel(x.head<6>());
        const double u = x(6);
        const SymTensor3 m = yieldFGradient(sig, mat.k);
        Eigen::Matrix<double, 7, 1> r;
        r.head<6>() = x.head<6>() - toMandel(sigmaTr) + 2.0 * mat.mu() * u * u * toMandel(m);
        r(6) = yieldF(sig, mat.k) - sigmaY(epsBarPn + u * u, mat);
        return r;
    }

    Eigen::Matrix<double, 7, 7> jacobian(const Eigen::Matrix<double, 7, 1>& x) const {
        const SymTensor3 sig = fromMandel(x.head<6>());
        const double u = x(6);
        const SymTensor3 m = yieldFGradient(sig, mat.k);
        const Tensor4 hess = yieldFHessian(sig, mat.k);
        Eigen::Matrix<double, 7, 7> J;
        J.setZero();
        J.topLeftCorner<6, 6>() =
            Eigen::Matrix<double, 6, 6>::Identity() + 2.0 * mat.mu() * u * u * hess.mandel();
        J.topRightCorner<6, 1>() = 4.0 * mat.mu() * u * toMandel(m);
        J.bottomLeftCorner<1, 6>() = toMandel(m).transpose();
        const double epsCur = epsBarPn + u * u;
        const double syp = (epsCur > 0.0) ? sigmaYPrime(epsCur, mat) : 0.0;
        J(6, 6) = -2.0 * u * std::min(syp, 1e30);
        return J;
    }
};

// Solve sigma = sigma_tr - 2 mu dl M(sigma) for fixed dl by damped Newton.
SymTensor3 solveSigmaForDl(const SymTensor3& sigmaTr, double dl, const ReferenceMaterial& mat,
                           const SymTensor3& init, double scale) {
    SymTensor3 sig = init;
    for (int it = 0; it < 80; ++it) {
        const SymTensor3 m = yieldFGradient(sig, mat.k);
        Eigen::Matrix<double, 6, 1> r =
            toMandel(sig) - toMandel(sigmaTr) + 2.0 * mat.mu() * dl * toMandel(m);
        if (r.norm() <= 1e-13 * scale) return sig;
        Eigen::Matrix<double, 6, 6> J =
            Eigen::Matrix<double, 6, 6>::Identity() +
            2.0 * mat.mu() * dl * yieldFHessian(sig, mat.k).mandel();
        Eigen::Matrix<double, 6, 1> dx = J.fullPivLu().solve(-r);
        double step = 1.0;
        const double r0 = r.norm();
        for (int ls = 0; ls < 30; ++ls) {
            SymTensor3 trial = fromMandel(toMandel(sig) + step * dx);
            const SymTensor3 mt = yieldFGradient(trial, mat.k);
            Eigen::Matrix<double, 6, 1> rt =
                toMandel(trial) - toMandel(sigmaTr) + 2.0 * mat.mu() * dl * toMandel(mt);
            if (rt.norm() < r0) {
                sig = trial;
                break;
            }
            step *= 0.5;
            if (ls == 29) sig = trial;
        }
    }
    return sig;
}

Tensor4 consistentTangent(const SymTensor3& sigma, double dl, double epsBarP,
                          const ReferenceMaterial& mat) {
    const double mu = mat.mu();
    const SymTensor3 m = yieldFGradient(sigma, mat.k);
    const Tensor4 hess = yieldFHessian(sigma, mat.k);
    const Eigen::Matrix<double, 6, 6> xi =
        (Eigen::Matrix<double, 6, 6>::Identity() + 2.0 * mu * dl * hess.mandel())
            .fullPivLu()
            .solve(Eigen::Matrix<double, 6, 6>::Identity());
    const Eigen::Matrix<double, 6, 1> mv = toMandel(m);
    const Eigen::Matrix<double, 6, 1> xim = xi * mv;
    const double syp = sigmaYPrime(epsBarP, mat);
    const Eigen::Matrix<double, 6, 6> cel = elasticTangent(mat.lambda(), mu).mandel();
    Eigen::Matrix<double, 6, 6> cons =
        (xi - (2.0 * mu / (syp + 2.0 * mu * mv.dot(xim))) * (xim * xim.transpose())) * cel;
    // Symmetrize away the last bits of roundoff.
    return Tensor4(0.5 * (cons + cons.transpose()));
}

}  // namespace

ReturnMapResult returnMap(const SymTensor3& epsTotal, const PlasticState& stateN,
                          const ReferenceMaterial& mat) {
    mat.validate();
    const Tensor4 cel = elasticTangent(mat.lambda(), mat.mu());
    const SymTensor3 sigmaTr = cel.apply(epsTotal - stateN.epsP);
    const double fTr = yieldF(sigmaTr, mat.k);
    const double syN = sigmaY(stateN.epsBarP, mat);

    ReturnMapResult res;
    res.state = stateN;
    if (fTr <= syN * (1.0 + 1e-12)) {
        res.sigma = sigmaTr;
        res.tangent = cel;
        return res;
    }

    const double mu = mat.mu();
    const double scale = std::max(fTr, syN);

    // Initial guess: deviator scaled radially onto the current yield level
    // (exact for theta-independent surfaces), multiplier from the classical
    // scalar estimate evaluated twice to account for the hardening slope.
    const double p = sigmaTr.trace() / 3.0;
    SymTensor3 sig0 = sigmaTr.deviator() * (syN / fTr) + p * SymTensor3::identity();
    double dl0 = (fTr - syN) / (3.0 * mu);
    const double syp0 = sigmaYPrime(stateN.epsBarP + dl0, mat);
    dl0 = (fTr - syN) / (3.0 * mu + std::min(syp0, 1e30));
    dl0 = std::max(dl0, 1e-16);

    LocalSystem sys{sigmaTr, mat, stateN.epsBarP, scale};
    Eigen::Matrix<double, 7, 1> x;
    x.head<6>() = toMandel(sig0);
    x(6) = std::sqrt(dl0);

    bool converged = false;
    Eigen::Matrix<double, 7, 1> r = sys.residual(x);
    int iter = 0;
    for (; iter < 60; ++iter) {
        if (r.norm() <= 1e-12 * scale) {
            converged = true;
            break;
        }
        Eigen::Matrix<double, 7, 1> dx = sys.jacobian(x).fullPivLu().solve(-r);
        double step = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 25; ++ls) {
            Eigen::Matrix<double, 7, 1> xt = x + step * dx;
            xt(6) = std::abs(xt(6));
            const Eigen::Matrix<double, 7, 1> rt = sys.residual(xt);
            if (rt.norm() < r.norm()) {
                x = xt;
                r = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }

    if (!converged) {
        // Monotone fallback: bisection on u with an inner stress solve.
        double lo = 0.0, hi = std::sqrt(std::max(dl0, 1e-16));
        auto g = [&](double u, SymTensor3& sigInit) {
            const SymTensor3 sig = solveSigmaForDl(sigmaTr, u * u, mat, sigInit, scale);
            sigInit = sig;
            return yieldF(sig, mat.k) - sigmaY(stateN.epsBarP + u * u, mat);
        };
        SymTensor3 sigHi = sig0;
        int expand = 0;
        while (g(hi, sigHi) > 0.0 && expand++ < 60) hi *= 2.0;
        if (expand >= 60)
            throw std::runtime_error("returnMap: failed to bracket the plastic multiplier");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            SymTensor3 sigMid = sigHi;
            if (g(mid, sigMid) > 0.0)
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= 1e-15 * (1.0 + hi)) break;
        }
        x(6) = hi;
        x.head<6>() = toMandel(solveSigmaForDl(sigmaTr, hi * hi, mat, sigHi, scale));
        r = sys.residual(x);
        if (r.norm() > 1e-8 * scale)
            throw std::runtime_error(
                "returnMap: local Newton failed, residual " + std::to_string(r.norm() / scale));
    }

    const double dl = x(6) * x(6);
    res.sigma = fromMandel(x.head<6>());
    const SymTensor3 flow = yieldFGradient(res.sigma, mat.k);
    res.state.epsP += dl * flow;
    res.state.epsBarP += dl;
    res.deltaLambda = dl;
    res.plastic = true;
    res.iterations = iter;
    res.tangent = consistentTangent(res.sigma, dl, res.state.epsBarP, mat);
    return res;
}

std::vector<UniaxialStep> driveUniaxial(const std::vector<double>& eps11Sequence,
                                        const ReferenceMaterial& mat) {
    mat.validate();
    std::vector<UniaxialStep> out;
    out.reserve(eps11Sequence.size());
    PlasticState state;
    double eps22 = 0.0;
    double prevEps11 = 0.0;
    const double tol = 1e-12 * mat.sigma0;
    for (const double eps11 : eps11Sequence) {
        eps22 += -mat.nu * (eps11 - prevEps11);  // elastic predictor for the lateral strain
        ReturnMapResult rm;
        bool done = false;
        for (int it = 0; it < 100; ++it) {
            rm = returnMap(SymTensor3::diagonal(eps11, eps22, eps22), state, mat);
            const double s22 = rm.sigma[kSym22];
            if (std::abs(s22) <= tol) {
                done = true;
                break;
            }
            const auto& cm = rm.tangent.mandel();
            const double slope = cm(1, 1) + cm(1, 2);
            eps22 -= s22 / slope;
        }
        if (!done) throw std::runtime_error("driveUniaxial: lateral-strain solve stalled");
        state = rm.state;
        UniaxialStep step;
        step.eps11 = eps11;
        step.eps22 = eps22;
        step.sig11 = rm.sigma[kSym11];
        step.state = state;
        out.push_back(step);
        prevEps11 = eps11;
    }
    return out;
}

}  // namespace hwdd

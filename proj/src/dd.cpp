#include "hwdd/dd.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hwdd/parallel.hpp"

namespace hwdd {

GammaResult gammaSolve(const SymTensor3& dEps, const SymTensor3& dSig, const SymTensor3& normal,
                       double lambda, double mu) {
    const SymTensor3 residual =
        lambda * dEps.trace() * SymTensor3::identity() + 2.0 * mu * dEps - dSig;
    const double nDotEps = normal.ddot(dEps);
    if (std::abs(nDotEps) < 1e-14 * dEps.norm())
        throw std::runtime_error("gammaSolve: N : dEps vanishes, identification ill-posed");

    GammaResult res;
    const double projection = residual.ddot(normal);
    res.gamma = projection / nDotEps;
    if (res.gamma < 0.0) {
        res.gamma = 0.0;
        res.clamped = true;
    }
    const double rNorm = residual.norm();
    if (rNorm > 0.0)
        res.offNormalResidual = (residual - projection * normal).norm() / rNorm;
    return res;
}

DDSolver::DDSolver(const Mesh& mesh, const YieldSurface& surface, const ExtendedData& data,
                   double lambda, double mu)
    : mesh_(mesh), surface_(surface), data_(data), lambda_(lambda), mu_(mu) {
    points_ = buildIntegration(mesh_);
    states_.resize(points_.size());
    const Tensor4 cel = elasticTangent(lambda_, mu_);
    for (auto& s : states_) s.C = cel;  // anchors start at zero, alpha_y at 1
    u_ = Eigen::VectorXd::Zero(static_cast<int>(mesh_.dofCount()));
}

SolveResult DDSolver::projectC(const BoundaryConditions& bc) {
    std::vector<Eigen::Matrix<double, 6, 6>> tangents(points_.size());
    std::vector<SymTensor3> epsHat(points_.size()), sigHat(points_.size());
    for (std::size_t p = 0; p < points_.size(); ++p) {
        tangents[p] = states_[p].C.voigtMatrix();
        epsHat[p] = states_[p].epsHat;
        sigHat[p] = states_[p].sigHat;
    }
    SolveResult sol = assembleAndSolve(mesh_, points_, tangents, epsHat, sigHat, bc);
    u_ = sol.u;
    const std::vector<SymTensor3> eps = strainsAt(points_, u_);
    for (std::size_t p = 0; p < points_.size(); ++p) {
        MaterialPointState& s = states_[p];
        s.eps = eps[p];
        s.sig = s.sigHat + s.C.apply(s.eps - s.epsHat);
    }
    return sol;
}

ProjectionStats DDSolver::projectD() {
    const Tensor4 cel = elasticTangent(lambda_, mu_);
    std::atomic<int> yielding{0}, clamped{0}, degenerate{0};

    parallelFor(states_.size(), [&](std::size_t p) {
        MaterialPointState& s = states_[p];
        const HWCoords hw = haighWestergaard(s.sig);
        double alpha = 0.0;
        bool elastic = true;
        if (hw.degenerate) {
            // No deviatoric direction exists; route to the elastic branch.
            degenerate.fetch_add(1);
        } else {
            alpha = hw.rho / surface_.phi(hw.theta);
            elastic = alpha <= s.alphaY;
        }

        if (elastic) {
            s.C = cel;
        } else {
            s.alphaY = alpha;
            const ExtDataPoint& nearest = data_.nearestByAlpha(alpha, /*inelastic=*/true);
            const PrincipalFrame frame = principalFrame(s.sig);
            const double mean = (frame.values[0] + frame.values[1] + frame.values[2]) / 3.0;
            const Eigen::Vector3d sPrincipal(frame.values[0] - mean, frame.values[1] - mean,
                                             frame.values[2] - mean);
            const double rhoPrime = alpha * surface_.phiPrime(hw.theta);
            const Eigen::Vector3d nHat =
                normalOctahedral(hw.theta, hw.rho, rhoPrime, sPrincipal);
            const SymTensor3 normal = normalCartesian(nHat, frame);
            const GammaResult gamma =
                gammaSolve(nearest.dEps, nearest.dSig, normal, lambda_, mu_);
            if (gamma.clamped) clamped.fetch_add(1);
            s.C = cel - gamma.gamma * Tensor4::outer(normal, normal);

            // The softened tangent must stay positive definite to remain a
            // valid assembly operator: gamma N(x)N removes at most 2 mu along
            // the unit deviatoric direction N.
            if (gamma.gamma >= 2.0 * mu_)
                throw std::runtime_error(
                    "projectD: identified gamma destroys tangent definiteness at point " +
                    std::to_string(p) + " (gamma = " + std::to_string(gamma.gamma) +
                    ", 2 mu = " + std::to_string(2.0 * mu_) + ")");
            yielding.fetch_add(1);
        }
        // Re-anchor the data state at the modeling point; this is what makes
        // one P_C/P_D cycle a fixed point of the iteration.
        s.epsHat = s.eps;
        s.sigHat = s.sig;
    });

    ProjectionStats stats;
    stats.yielding = yielding.load();
    stats.gammaClamped = clamped.load();
    stats.degenerateLode = degenerate.load();
    lastStats_ = stats;
    return stats;
}

void DDSolver::step(const BoundaryConditions& bc, bool verifyFixedPoint) {
    projectC(bc);
    projectD();
    uScale_ = std::max(uScale_, u_.norm());
    if (verifyFixedPoint) {
        // Re-running P_C with the post-P_D anchors must reproduce u; probe it
        // without disturbing the solver state. The largest displacement seen
        // so far is the scale; at a fully unloaded step u itself is pure
        // roundoff and dividing by it would measure noise against noise.
        const Eigen::VectorXd uBefore = u_;
        const std::vector<MaterialPointState> saved = states_;
        projectC(bc);
        const double scale = std::max(uBefore.norm(), uScale_);
        fixedPointDelta_ = scale > 0.0 ? (u_ - uBefore).norm() / scale : (u_ - uBefore).norm();
        states_ = saved;
        u_ = uBefore;
    }
}

}  // namespace hwdd

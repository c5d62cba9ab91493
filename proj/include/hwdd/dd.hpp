#ifndef HWDD_DD_HPP
#define HWDD_DD_HPP

#include <vector>

#include "hwdd/data.hpp"
#include "hwdd/fem.hpp"
#include "hwdd/tensor.hpp"
#include "hwdd/yield.hpp"

namespace hwdd {

/// Per-integration-point state of the data-driven solver: the current
/// modeling point, the data anchor the next constraint projection linearizes
/// around, the assigned tangent, and the running yield multiplier.
struct MaterialPointState {
    SymTensor3 eps;
    SymTensor3 sig;
    SymTensor3 epsHat;
    SymTensor3 sigHat;
    Tensor4 C;
    double alphaY = 1.0;
};

struct GammaResult {
    double gamma = 0.0;            // Pa, clamped to >= 0
    double offNormalResidual = 0.0;  // |R - (R:N)N| / |R|, data-consistency diagnostic
    bool clamped = false;
};

/// Identify the rank-one tangent weight from a data increment: with
/// R = C^el : dEps - dSig, gamma = (R : N) / (N : dEps), so that
/// (C^el - gamma N(x)N) : dEps matches dSig along N. Throws when
/// |N : dEps| < 1e-14 |dEps| (ill-posed identification).
GammaResult gammaSolve(const SymTensor3& dEps, const SymTensor3& dSig, const SymTensor3& normal,
                       double lambda, double mu);

/// Diagnostics accumulated over one projection onto the data set.
struct ProjectionStats {
    int yielding = 0;         // points routed to the inelastic branch
    int gammaClamped = 0;     // negative gamma clamped to zero
    int degenerateLode = 0;   // hydrostatic states treated as elastic
};

/// Data-driven solver: alternating projections P_C (constraint set, one
/// linear solve) and P_D (data set, per-point tangent assignment in
/// Haigh-Westergaard coordinates). Because P_D anchors each point at its
/// own modeling state, a single P_C/P_D cycle per load step is a fixed
/// point of the iteration.
class DDSolver {
public:
    DDSolver(const Mesh& mesh, const YieldSurface& surface, const ExtendedData& data,
             double lambda, double mu);

    /// P_C: solve the linearized global system for the current anchors and
    /// tangents, then update all modeling points.
    SolveResult projectC(const BoundaryConditions& bc);

    /// P_D: evaluate the transition rule per point, assign tangents from the
    /// data set and re-anchor at the modeling points. Runs in parallel over
    /// points.
    ProjectionStats projectD();

    /// One load step: P_C followed by P_D. With `verifyFixedPoint` a second
    /// P_C is run and the relative displacement change is recorded (it must
    /// vanish, see lastFixedPointDelta()).
    void step(const BoundaryConditions& bc, bool verifyFixedPoint = false);

    const std::vector<MaterialPointState>& states() const { return states_; }
    const std::vector<IntegrationPoint>& integrationPoints() const { return points_; }
    const Eigen::VectorXd& displacements() const { return u_; }
    const ProjectionStats& lastStats() const { return lastStats_; }
    double lastFixedPointDelta() const { return fixedPointDelta_; }

private:
    const Mesh& mesh_;
    const YieldSurface& surface_;
    const ExtendedData& data_;
    double lambda_;
    double mu_;
    std::vector<IntegrationPoint> points_;
    std::vector<MaterialPointState> states_;
    Eigen::VectorXd u_;
    ProjectionStats lastStats_;
    double fixedPointDelta_ = 0.0;
    double uScale_ = 0.0;
};

}  // namespace hwdd

#endif

#ifndef HWDD_REFERENCE_SOLVER_HPP
#define HWDD_REFERENCE_SOLVER_HPP

#include <vector>

#include "hwdd/fem.hpp"
#include "hwdd/reference.hpp"

namespace hwdd {

/// Classical elasto-plastic solver: return mapping at every integration
/// point inside a Newton-Raphson loop restoring global equilibrium, with
/// automatic step bisection on divergence.
class ReferenceSolver {
public:
    ReferenceSolver(const Mesh& mesh, const ReferenceMaterial& mat);

    /// Advance to the given boundary conditions. Dirichlet values and forces
    /// are interpolated linearly from the previous step during bisection.
    void step(const BoundaryConditions& bc);

    const std::vector<SymTensor3>& strains() const { return eps_; }
    const std::vector<SymTensor3>& stresses() const { return sig_; }
    const std::vector<PlasticState>& plasticStates() const { return plastic_; }
    const std::vector<IntegrationPoint>& integrationPoints() const { return points_; }
    const Eigen::VectorXd& displacements() const { return u_; }

private:
    bool tryAdvance(const BoundaryConditions& bc);

    const Mesh& mesh_;
    ReferenceMaterial mat_;
    std::vector<IntegrationPoint> points_;
    std::vector<SymTensor3> eps_;
    std::vector<SymTensor3> sig_;
    std::vector<PlasticState> plastic_;
    Eigen::VectorXd u_;
    BoundaryConditions lastBC_;
};

}  // namespace hwdd

#endif

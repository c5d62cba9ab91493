#ifndef HWDD_FEM_HPP
#define HWDD_FEM_HPP

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hwdd/tensor.hpp"

namespace hwdd {

/// Tetrahedral mesh, P1 (4-node) or P2 (10-node). For P2 the first four
/// connectivity entries are the vertices and the remaining six are midside
/// nodes on edges (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
struct Mesh {
    std::vector<Eigen::Vector3d> nodes;
    std::vector<std::vector<int>> elements;
    int order = 1;

    int nodesPerElement() const { return order == 1 ? 4 : 10; }
    std::size_t dofCount() const { return 3 * nodes.size(); }

    Eigen::Vector3d boundsMin() const;
    Eigen::Vector3d boundsMax() const;
};

/// Structured box mesh [0,L]^3 scaled per axis, each cell split into six
/// positively oriented tetrahedra.
Mesh makeBox(int nx, int ny, int nz, double lx = 1.0, double ly = 1.0, double lz = 1.0,
             int order = 1);

/// Quarter plate [0,a]x[0,b] with a quarter-circular hole of radius r at the
/// origin, extruded to thickness c in z. `refinement` scales the angular,
/// radial and thickness divisions. Throws when r >= min(a, b).
struct PlateSpec {
    double a = 5.0;
    double b = 5.0;
    double c = 2.0;
    double r = 1.0;
    int refinement = 1;
    int order = 1;
};
Mesh makeQuarterPlate(const PlateSpec& spec);

// Mesh text format: line 1 `nodes N elements M order P`, then N coordinate
// lines, then M connectivity lines.
Mesh readMeshText(const std::string& path);
void writeMeshText(const std::string& path, const Mesh& mesh);

/// One quadrature point: weight includes the Jacobian determinant, the
/// B-operator maps local nodal displacements to the engineering-strain
/// Voigt vector (11, 22, 33, 2*23, 2*13, 2*12).
struct IntegrationPoint {
    int element = 0;
    int local = 0;
    double weight = 0.0;
    Eigen::Matrix<double, 6, Eigen::Dynamic> B;
    std::vector<int> dofs;  // global dof indices for the element
};

/// 1-point quadrature for P1, 4-point for P2 (exact for the respective
/// strain fields). Throws naming the element if its Jacobian is not
/// positive.
std::vector<IntegrationPoint> buildIntegration(const Mesh& mesh);

struct DirichletBC {
    int node = 0;
    int dof = 0;  // 0, 1, 2
    double value = 0.0;
};

struct BoundaryConditions {
    std::vector<DirichletBC> dirichlet;
    Eigen::VectorXd force;  // global Neumann nodal force vector (3N), may be empty

    /// Throws if a (node, dof) pair is constrained twice.
    void validate(std::size_t dofCount) const;
};

/// Nodes of `mesh` lying on an axis-aligned face of the bounding box;
/// `axis` in {0,1,2}, `atMax` selects the min or max face.
std::vector<int> faceNodes(const Mesh& mesh, int axis, bool atMax, double tol = 1e-9);

/// Consistent nodal forces for a constant traction on a boundary face of the
/// bounding box, added into `force` (resized to 3N if empty).
void addFaceTraction(const Mesh& mesh, int axis, bool atMax, const Eigen::Vector3d& traction,
                     Eigen::VectorXd& force);

struct SolveResult {
    Eigen::VectorXd u;
    double residual = 0.0;  // |K u - rhs| / |rhs| on free dofs
};

/// Solve (sum_e w_e B_e^T C_e B_e) u = f - sum_e w_e B_e^T (sigHat_e -
/// C_e epsHat_e) with Dirichlet elimination. `tangents` are 6x6 Voigt
/// matrices, anchors are (strain, stress) tensors per integration point.
/// Throws on a singular reduced system.
SolveResult assembleAndSolve(const Mesh& mesh, const std::vector<IntegrationPoint>& points,
                             const std::vector<Eigen::Matrix<double, 6, 6>>& tangents,
                             const std::vector<SymTensor3>& epsHat,
                             const std::vector<SymTensor3>& sigHat,
                             const BoundaryConditions& bc);

/// Strains at every integration point for the given displacement vector.
std::vector<SymTensor3> strainsAt(const std::vector<IntegrationPoint>& points,
                                  const Eigen::VectorXd& u);

/// Internal force vector sum_e w_e B_e^T sigma_e.
Eigen::VectorXd internalForces(std::size_t dofCount,
                               const std::vector<IntegrationPoint>& points,
                               const std::vector<SymTensor3>& sigma);

}  // namespace hwdd

#endif

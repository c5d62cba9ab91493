#include "hwdd/fem.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace hwdd {

namespace {

// Six positively oriented tetrahedra around the main diagonal of a hex cell;
// corner indices are bit codes (x | y<<1 | z<<2).
constexpr int kHexTets[6][4] = {
    {0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7}, {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7},
};

constexpr int kEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

void appendHexAsTets(const std::array<int, 8>& corner, std::vector<std::vector<int>>& elements) {
    for (const auto& tet : kHexTets)
        elements.push_back({corner[tet[0]], corner[tet[1]], corner[tet[2]], corner[tet[3]]});
}

/// Insert midside nodes on every edge, turning a P1 mesh into P2.
void promoteToP2(Mesh& mesh) {
    std::map<std::pair<int, int>, int> midOf;
    for (auto& elem : mesh.elements) {
        elem.resize(10);
        for (int e = 0; e < 6; ++e) {
            int a = elem[kEdges[e][0]];
            int b = elem[kEdges[e][1]];
            if (a > b) std::swap(a, b);
            auto [it, inserted] = midOf.try_emplace({a, b}, static_cast<int>(mesh.nodes.size()));
            if (inserted) mesh.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
            elem[4 + e] = it->second;
        }
    }
    mesh.order = 2;
}

}  // namespace

Eigen::Vector3d Mesh::boundsMin() const {
    Eigen::Vector3d lo = nodes.front();
    for (const auto& n : nodes) lo = lo.cwiseMin(n);
    return lo;
}

Eigen::Vector3d Mesh::boundsMax() const {
    Eigen::Vector3d hi = nodes.front();
    for (const auto& n : nodes) hi = hi.cwiseMax(n);
    return hi;
}

Mesh makeBox(int nx, int ny, int nz, double lx, double ly, double lz, int order) {
    if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("makeBox: divisions must be >= 1");
    if (order != 1 && order != 2) throw std::invalid_argument("makeBox: order must be 1 or 2");
    Mesh mesh;
    auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                mesh.nodes.emplace_back(lx * i / nx, ly * j / ny, lz * k / nz);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::array<int, 8> corner;
                for (int b = 0; b < 8; ++b)
                    corner[b] = id(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1));
                appendHexAsTets(corner, mesh.elements);
            }
    if (order == 2) promoteToP2(mesh);
    return mesh;
}

Mesh makeQuarterPlate(const PlateSpec& spec) {
    if (spec.r >= std::min(spec.a, spec.b))
        throw std::invalid_argument("makeQuarterPlate: hole radius exceeds the plate");
    if (spec.r <= 0.0 || spec.c <= 0.0)
        throw std::invalid_argument("makeQuarterPlate: non-positive dimension");
    if (spec.refinement < 1) throw std::invalid_argument("makeQuarterPlate: refinement >= 1");
    if (spec.order != 1 && spec.order != 2)
        throw std::invalid_argument("makeQuarterPlate: order must be 1 or 2");

    const int nPhi = 4 * spec.refinement;  // angular divisions over 90 degrees
    const int nT = 2 * spec.refinement;    // radial divisions hole -> outer boundary
    const int nZ = spec.refinement;        // thickness divisions

    // Blend between the hole arc and the outer square boundary along each ray.
    const double phiDiag = std::atan2(spec.b, spec.a);
    auto outer = [&](double phi) -> Eigen::Vector2d {
        if (phi <= phiDiag) return {spec.a, spec.a * std::tan(phi)};
        return {spec.b * std::tan(M_PI / 2.0 - phi), spec.b};
    };

    Mesh mesh;
    auto id = [&](int ip, int it, int iz) {
        return (iz * (nT + 1) + it) * (nPhi + 1) + ip;
    };
    for (int iz = 0; iz <= nZ; ++iz)
        for (int it = 0; it <= nT; ++it)
            for (int ip = 0; ip <= nPhi; ++ip) {
                const double phi = M_PI / 2.0 * ip / nPhi;
                const double t = static_cast<double>(it) / nT;
                const Eigen::Vector2d hole(spec.r * std::cos(phi), spec.r * std::sin(phi));
                const Eigen::Vector2d xy = (1.0 - t) * hole + t * outer(phi);
                mesh.nodes.emplace_back(xy.x(), xy.y(), spec.c * iz / nZ);
            }
    for (int iz = 0; iz < nZ; ++iz)
        for (int it = 0; it < nT; ++it)
            for (int ip = 0; ip < nPhi; ++ip) {
                // (radial, angular, z) is the right-handed corner order here.
                std::array<int, 8> corner = {
                    id(ip, it, iz),         id(ip, it + 1, iz),
                    id(ip + 1, it, iz),     id(ip + 1, it + 1, iz),
                    id(ip, it, iz + 1),     id(ip, it + 1, iz + 1),
                    id(ip + 1, it, iz + 1), id(ip + 1, it + 1, iz + 1),
                };
                appendHexAsTets(corner, mesh.elements);
            }
    if (spec.order == 2) promoteToP2(mesh);
    return mesh;
}

Mesh readMeshText(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file: " + path);
    std::string kw1, kw2, kw3;
    std::size_t n, m;
    int order;
    if (!(in >> kw1 >> n >> kw2 >> m >> kw3 >> order) || kw1 != "nodes" || kw2 != "elements" ||
        kw3 != "order")
        throw std::runtime_error("malformed mesh header in " + path);
    if (order != 1 && order != 2) throw std::runtime_error("unsupported mesh order in " + path);
    Mesh mesh;
    mesh.order = order;
    mesh.nodes.resize(n);
    for (auto& node : mesh.nodes)
        if (!(in >> node.x() >> node.y() >> node.z()))
            throw std::runtime_error("truncated node block in " + path);
    const int npe = mesh.nodesPerElement();
    mesh.elements.assign(m, std::vector<int>(npe));
    for (auto& elem : mesh.elements)
        for (int& v : elem) {
            if (!(in >> v)) throw std::runtime_error("truncated element block in " + path);
            if (v < 0 || static_cast<std::size_t>(v) >= n)
                throw std::runtime_error("connectivity index out of range in " + path);
        }
    return mesh;
}

void writeMeshText(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mesh file: " + path);
    out << "nodes " << mesh.nodes.size() << " elements " << mesh.elements.size() << " order "
        << mesh.order << "\n";
    char buf[120];
    for (const auto& node : mesh.nodes) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", node.x(), node.y(), node.z());
        out << buf;
    }
    for (const auto& elem : mesh.elements) {
        for (std::size_t i = 0; i < elem.size(); ++i) out << (i ? " " : "") << elem[i];
        out << "\n";
    }
}

std::vector<IntegrationPoint> buildIntegration(const Mesh& mesh) {
    std::vector<IntegrationPoint> points;
    const int npe = mesh.nodesPerElement();

    // Quadrature in barycentric coordinates (l1, l2, l3), l0 = 1 - sum.
    struct QP {
        double l1, l2, l3, w;
    };
    std::vector<QP> rule;
    if (mesh.order == 1) {
        rule = {{0.25, 0.25, 0.25, 1.0}};
    } else {
        const double alpha = 0.5854101966249685;
        const double beta = 0.1381966011250105;
        rule = {{beta, beta, beta, 0.25},
                {alpha, beta, beta, 0.25},
                {beta, alpha, beta, 0.25},
                {beta, beta, alpha, 0.25}};
    }

    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& elem = mesh.elements[e];
        const Eigen::Vector3d& x0 = mesh.nodes[elem[0]];
        Eigen::Matrix3d J;  // columns: edge vectors to vertices 1..3
        for (int i = 0; i < 3; ++i) J.col(i) = mesh.nodes[elem[i + 1]] - x0;
        const double detJ = J.determinant();
        if (detJ <= 0.0)
            throw std::runtime_error("buildIntegration: element " + std::to_string(e) +
                                     " has non-positive Jacobian");
        const double volume = detJ / 6.0;
        // Gradients of the barycentric coordinates (constant over the tet).
        const Eigen::Matrix3d Jinv = J.inverse();
        Eigen::Matrix<double, 4, 3> gradL;
        gradL.row(1) = Jinv.row(0);
        gradL.row(2) = Jinv.row(1);
        gradL.row(3) = Jinv.row(2);
        gradL.row(0) = -gradL.row(1) - gradL.row(2) - gradL.row(3);

        std::vector<int> dofs(3 * npe);
        for (int a = 0; a < npe; ++a)
            for (int d = 0; d < 3; ++d) dofs[3 * a + d] = 3 * elem[a] + d;

        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double l[4] = {1.0 - rule[q].l1 - rule[q].l2 - rule[q].l3, rule[q].l1,
                                 rule[q].l2, rule[q].l3};
            Eigen::Matrix<double, Eigen::Dynamic, 3> gradN(npe, 3);
            if (mesh.order == 1) {
                gradN = gradL;
            } else {
                for (int v = 0; v < 4; ++v)
                    gradN.row(v) = (4.0 * l[v] - 1.0) * gradL.row(v);
                for (int eIdx = 0; eIdx < 6; ++eIdx) {
                    const int a = kEdges[eIdx][0], b = kEdges[eIdx][1];
                    gradN.row(4 + eIdx) = 4.0 * (l[a] * gradL.row(b) + l[b] * gradL.row(a));
                }
            }

            IntegrationPoint ip;
            ip.element = static_cast<int>(e);
            ip.local = static_cast<int>(q);
            ip.weight = volume * rule[q].w;
            ip.dofs = dofs;
            ip.B.setZero(6, 3 * npe);
            for (int a = 0; a < npe; ++a) {
                const double dx = gradN(a, 0), dy = gradN(a, 1), dz = gradN(a, 2);
                ip.B(0, 3 * a + 0) = dx;
                ip.B(1, 3 * a + 1) = dy;
                ip.B(2, 3 * a + 2) = dz;
                ip.B(3, 3 * a + 1) = dz;  // 2 eps23
                ip.B(3, 3 * a + 2) = dy;
                ip.B(4, 3 * a + 0) = dz;  // 2 eps13
                ip.B(4, 3 * a + 2) = dx;
                ip.B(5, 3 * a + 0) = dy;  // 2 eps12
                ip.B(5, 3 * a + 1) = dx;
            }
            points.push_back(std::move(ip));
        }
    }
    return points;
}

void BoundaryConditions::validate(std::size_t dofCount) const {
    std::set<std::pair<int, int>> seen;
    for (const auto& d : dirichlet) {
        if (d.dof < 0 || d.dof > 2 || d.node < 0 ||
            static_cast<std::size_t>(3 * d.node + d.dof) >= dofCount)
            throw std::invalid_argument("BoundaryConditions: node/dof out of range");
        if (!seen.insert({d.node, d.dof}).second)
            throw std::invalid_argument("BoundaryConditions: duplicate (node, dof) constraint");
    }
    if (force.size() != 0 && static_cast<std::size_t>(force.size()) != dofCount)
        throw std::invalid_argument("BoundaryConditions: force vector has the wrong size");
}

std::vector<int> faceNodes(const Mesh& mesh, int axis, bool atMax, double tol) {
    const Eigen::Vector3d lo = mesh.boundsMin();
    const Eigen::Vector3d hi = mesh.boundsMax();
    const double target = atMax ? hi(axis) : lo(axis);
    const double scale = std::max(1.0, (hi - lo).norm());
    std::vector<int> out;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        if (std::abs(mesh.nodes[i](axis) - target) <= tol * scale)
            out.push_back(static_cast<int>(i));
    return out;
}

void addFaceTraction(const Mesh& mesh, int axis, bool atMax, const Eigen::Vector3d& traction,
                     Eigen::VectorXd& force) {
    if (force.size() == 0) force = Eigen::VectorXd::Zero(mesh.dofCount());

    const std::vector<int> nodesOnFace = faceNodes(mesh, axis, atMax);
    const std::unordered_set<int> onFace(nodesOnFace.begin(), nodesOnFace.end());

    // Boundary triangles: tet faces that occur exactly once.
    static constexpr int kFaces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    // Midside node of each P2 vertex pair within the element.
    auto midNode = [&](const std::vector<int>& elem, int a, int b) {
        for (int e = 0; e < 6; ++e) {
            const int va = elem[kEdges[e][0]], vb = elem[kEdges[e][1]];
            if ((va == a && vb == b) || (va == b && vb == a)) return elem[4 + e];
        }
        throw std::logic_error("addFaceTraction: edge not found");
    };

    std::map<std::array<int, 3>, std::pair<const std::vector<int>*, int>> faceCount;
    std::map<std::array<int, 3>, int> count;
    for (const auto& elem : mesh.elements)
        for (int f = 0; f < 4; ++f) {
            std::array<int, 3> key = {elem[kFaces[f][0]], elem[kFaces[f][1]], elem[kFaces[f][2]]};
            std::array<int, 3> sorted = key;
            std::sort(sorted.begin(), sorted.end());
            count[sorted]++;
            faceCount[sorted] = {&elem, f};
        }

    for (const auto& [sorted, info] : faceCount) {
        if (count[sorted] != 1) continue;
        const auto& elem = *info.first;
        const int f = info.second;
        const int v0 = elem[kFaces[f][0]], v1 = elem[kFaces[f][1]], v2 = elem[kFaces[f][2]];
        if (!onFace.count(v0) || !onFace.count(v1) || !onFace.count(v2)) continue;
        const double area =
            0.5 * (mesh.nodes[v1] - mesh.nodes[v0]).cross(mesh.nodes[v2] - mesh.nodes[v0]).norm();
        if (mesh.order == 1) {
            for (const int v : {v0, v1, v2})
                force.segment<3>(3 * v) += traction * (area / 3.0);
        } else {
            // Quadratic triangle under constant traction: the consistent
            // load sits entirely on the midside nodes.
            for (const auto& [a, b] : {std::pair{v0, v1}, {v1, v2}, {v2, v0}})
                force.segment<3>(3 * midNode(elem, a, b)) += traction * (area / 3.0);
        }
    }
}

SolveResult assembleAndSolve(const Mesh& mesh, const std::vector<IntegrationPoint>& points,
                             const std::vector<Eigen::Matrix<double, 6, 6>>& tangents,
                             const std::vector<SymTensor3>& epsHat,
                             const std::vector<SymTensor3>& sigHat,
                             const BoundaryConditions& bc) {
    const std::size_t nDof = mesh.dofCount();
    bc.validate(nDof);
    if (tangents.size() != points.size() || epsHat.size() != points.size() ||
        sigHat.size() != points.size())
        throw std::invalid_argument("assembleAndSolve: per-point array size mismatch");

    Eigen::VectorXd rhs =
        bc.force.size() ? bc.force : Eigen::VectorXd::Zero(static_cast<int>(nDof));
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const auto& ip = points[p];
        const Eigen::MatrixXd ke = ip.weight * ip.B.transpose() * tangents[p] * ip.B;
        const Eigen::VectorXd fe =
            ip.weight * ip.B.transpose() *
            (toVoigtStress(sigHat[p]) - tangents[p] * toVoigtStrain(epsHat[p]));
        const auto& dofs = ip.dofs;
        for (std::size_t i = 0; i < dofs.size(); ++i) {
            rhs(dofs[i]) -= fe(static_cast<int>(i));
            for (std::size_t j = 0; j < dofs.size(); ++j)
                triplets.emplace_back(dofs[i], dofs[j], ke(static_cast<int>(i),
                                                          static_cast<int>(j)));
        }
    }
    Eigen::SparseMatrix<double> K(static_cast<int>(nDof), static_cast<int>(nDof));
    K.setFromTriplets(triplets.begin(), triplets.end());

    // Partition into free and constrained dofs.
    std::vector<int> freeIndex(nDof, -1);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<int>(nDof));
    std::vector<bool> fixed(nDof, false);
    for (const auto& d : bc.dirichlet) {
        fixed[3 * d.node + d.dof] = true;
        u(3 * d.node + d.dof) = d.value;
    }
    int nFree = 0;
    for (std::size_t i = 0; i < nDof; ++i)
        if (!fixed[i]) freeIndex[i] = nFree++;
    if (nFree == 0) return {u, 0.0};

    Eigen::VectorXd rhsFree = Eigen::VectorXd::Zero(nFree);
    for (std::size_t i = 0; i < nDof; ++i)
        if (freeIndex[i] >= 0) rhsFree(freeIndex[i]) = rhs(static_cast<int>(i));
    std::vector<Eigen::Triplet<double>> freeTriplets;
    for (int col = 0; col < K.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
            const int i = static_cast<int>(it.row()), j = col;
            if (freeIndex[i] >= 0 && freeIndex[j] >= 0)
                freeTriplets.emplace_back(freeIndex[i], freeIndex[j], it.value());
            else if (freeIndex[i] >= 0 && fixed[j])
                rhsFree(freeIndex[i]) -= it.value() * u(j);
        }
    Eigen::SparseMatrix<double> Kff(nFree, nFree);
    Kff.setFromTriplets(freeTriplets.begin(), freeTriplets.end());

    Eigen::VectorXd uFree;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(Kff);
    if (llt.info() == Eigen::Success) {
        uFree = llt.solve(rhsFree);
    } else {
        // Reference Newton tangents can be indefinite; fall back to LU.
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Kff);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("assembleAndSolve: singular system (insufficient constraints)");
        uFree = lu.solve(rhsFree);
    }

    const double rhsNorm = rhsFree.norm();
    double residual = (Kff * uFree - rhsFree).norm();
    if (rhsNorm > 0.0) residual /= rhsNorm;
    if (!std::isfinite(residual) || (rhsNorm > 0.0 && residual > 1e-10))
        throw std::runtime_error("assembleAndSolve: singular system (insufficient constraints)");

    for (std::size_t i = 0; i < nDof; ++i)
        if (freeIndex[i] >= 0) u(static_cast<int>(i)) = uFree(freeIndex[i]);
    return {u, residual};
}

std::vector<SymTensor3> strainsAt(const std::vector<IntegrationPoint>& points,
                                  const Eigen::VectorXd& u) {
    std::vector<SymTensor3> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        const auto& ip = points[p];
        Eigen::VectorXd ue(ip.dofs.size());
        for (std::size_t i = 0; i < ip.dofs.size(); ++i) ue(static_cast<int>(i)) = u(ip.dofs[i]);
        out[p] = fromVoigtStrain(ip.B * ue);
    }
    return out;
}

Eigen::VectorXd internalForces(std::size_t dofCount, const std::vector<IntegrationPoint>& points,
                               const std::vector<SymTensor3>& sigma) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<int>(dofCount));
    for (std::size_t p = 0; p < points.size(); ++p) {
        const auto& ip = points[p];
        const Eigen::VectorXd fe = ip.weight * ip.B.transpose() * toVoigtStress(sigma[p]);
        for (std::size_t i = 0; i < ip.dofs.size(); ++i)
            f(ip.dofs[i]) += fe(static_cast<int>(i));
    }
    return f;
}

}  // namespace hwdd

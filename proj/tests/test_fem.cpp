#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "hwdd/fem.hpp"
#include "hwdd/reference.hpp"

using namespace hwdd;

namespace {

Eigen::Matrix<double, 6, 6> elasticVoigt(double E, double nu) {
    const double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double mu = E / (2.0 * (1.0 + nu));
    return elasticTangent(lambda, mu).voigtMatrix();
}

struct ElasticProblem {
    std::vector<Eigen::Matrix<double, 6, 6>> tangents;
    std::vector<SymTensor3> epsHat, sigHat;
};

ElasticProblem uniformElastic(std::size_t points, double E, double nu) {
    ElasticProblem p;
    p.tangents.assign(points, elasticVoigt(E, nu));
    p.epsHat.assign(points, SymTensor3{});
    p.sigHat.assign(points, SymTensor3{});
    return p;
}

}  // namespace

TEST_CASE("box mesh basics") {
    const Mesh mesh = makeBox(1, 1, 1);
    CHECK(mesh.nodes.size() == 8);
    CHECK(mesh.elements.size() == 6);
    const auto points = buildIntegration(mesh);
    double volume = 0.0;
    for (const auto& ip : points) {
        CHECK(ip.weight > 0.0);
        volume += ip.weight;
    }
    CHECK(volume == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("integration points reproduce linear fields") {
    for (const int order : {1, 2}) {
        const Mesh mesh = makeBox(2, 2, 2, 1.0, 1.0, 1.0, order);
        const auto points = buildIntegration(mesh);

        // Per-element volumes sum to the weights.
        std::vector<double> perElement(mesh.elements.size(), 0.0);
        for (const auto& ip : points) perElement[ip.element] += ip.weight;
        double volume = 0.0;
        for (const double v : perElement) volume += v;
        CHECK(volume == doctest::Approx(1.0).epsilon(1e-10));

        // Rigid-body translation produces zero strain.
        Eigen::VectorXd u = Eigen::VectorXd::Zero(mesh.dofCount());
        for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
            u(3 * n) = 0.7;
            u(3 * n + 1) = -0.3;
            u(3 * n + 2) = 0.1;
        }
        for (const auto& eps : strainsAt(points, u)) CHECK(eps.norm() <= 1e-12);

        // Uniform stretch u_x = delta x gives eps11 = delta everywhere.
        const double delta = 1e-3;
        for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
            u(3 * n) = delta * mesh.nodes[n].x();
            u(3 * n + 1) = 0.0;
            u(3 * n + 2) = 0.0;
        }
        for (const auto& eps : strainsAt(points, u)) {
            CHECK(eps[kSym11] == doctest::Approx(delta).epsilon(1e-12));
            CHECK(std::abs(eps[kSym22]) + std::abs(eps[kSym33]) <= 1e-15);
        }
    }
}

TEST_CASE("inverted element is reported by index") {
    Mesh mesh = makeBox(1, 1, 1);
    std::swap(mesh.elements[3][0], mesh.elements[3][1]);
    CHECK_THROWS_WITH_AS(buildIntegration(mesh),
                         "buildIntegration: element 3 has non-positive Jacobian",
                         std::runtime_error);
}

TEST_CASE("patch test: homogeneous Dirichlet stretch") {
    for (const int order : {1, 2}) {
        const Mesh mesh = makeBox(2, 3, 2, 1.0, 1.0, 1.0, order);
        const auto points = buildIntegration(mesh);
        const auto prob = uniformElastic(points.size(), 3e10, 0.2);

        // Affine field prescribed on the whole boundary.
        const double delta = 2e-3;
        BoundaryConditions bc;
        const Eigen::Vector3d lo = mesh.boundsMin(), hi = mesh.boundsMax();
        for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
            const auto& x = mesh.nodes[n];
            bool onBoundary = false;
            for (int d = 0; d < 3; ++d)
                onBoundary |= (std::abs(x(d) - lo(d)) < 1e-12 || std::abs(x(d) - hi(d)) < 1e-12);
            if (!onBoundary) continue;
            bc.dirichlet.push_back({static_cast<int>(n), 0, delta * x.x()});
            bc.dirichlet.push_back({static_cast<int>(n), 1, 0.0});
            bc.dirichlet.push_back({static_cast<int>(n), 2, 0.0});
        }
        const SolveResult sol =
            assembleAndSolve(mesh, points, prob.tangents, prob.epsHat, prob.sigHat, bc);
        for (const auto& eps : strainsAt(points, sol.u)) {
            CHECK(eps[kSym11] == doctest::Approx(delta).epsilon(1e-9));
            CHECK(std::abs(eps[kSym23]) <= 1e-9 * delta);
        }
    }
}

TEST_CASE("solution is unchanged when anchors already solve the problem") {
    const Mesh mesh = makeBox(2, 2, 2);
    const auto points = buildIntegration(mesh);
    auto prob = uniformElastic(points.size(), 3e10, 0.2);

    BoundaryConditions bc;
    for (const int n : faceNodes(mesh, 0, false)) bc.dirichlet.push_back({n, 0, 0.0});
    for (const int n : faceNodes(mesh, 1, false)) bc.dirichlet.push_back({n, 1, 0.0});
    for (const int n : faceNodes(mesh, 2, false)) bc.dirichlet.push_back({n, 2, 0.0});
    for (const int n : faceNodes(mesh, 0, true)) bc.dirichlet.push_back({n, 0, 1e-3});

    const SolveResult first =
        assembleAndSolve(mesh, points, prob.tangents, prob.epsHat, prob.sigHat, bc);

    // Feed the exact solution back as the data state: the right-hand side
    // telescopes and u must not move.
    const auto eps = strainsAt(points, first.u);
    for (std::size_t p = 0; p < points.size(); ++p) {
        prob.epsHat[p] = eps[p];
        prob.sigHat[p] = fromVoigtStress(prob.tangents[p] * toVoigtStrain(eps[p]));
    }
    const SolveResult second =
        assembleAndSolve(mesh, points, prob.tangents, prob.epsHat, prob.sigHat, bc);
    CHECK((second.u - first.u).norm() <= 1e-12 * first.u.norm());
}

TEST_CASE("two-element bar matches a hand-assembled solve") {
    // 1D chain of two linear springs via a 3D mesh restricted to axial motion:
    // nodes at x = 0, 0.5, 1; fix x = 0, pull x = 1 with a point force. The
    // middle plane displacement must be half of the end displacement for a
    // uniform bar (hand solve of the 2x2 system).
    const Mesh mesh = makeBox(2, 1, 1);
    const auto points = buildIntegration(mesh);
    const auto prob = uniformElastic(points.size(), 1e10, 0.0);

    BoundaryConditions bc;
    for (const int n : faceNodes(mesh, 0, false)) bc.dirichlet.push_back({n, 0, 0.0});
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
        bc.dirichlet.push_back({static_cast<int>(n), 1, 0.0});
        bc.dirichlet.push_back({static_cast<int>(n), 2, 0.0});
    }
    const double delta = 1e-3;
    for (const int n : faceNodes(mesh, 0, true)) bc.dirichlet.push_back({n, 0, delta});
    const SolveResult sol =
        assembleAndSolve(mesh, points, prob.tangents, prob.epsHat, prob.sigHat, bc);
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
        if (std::abs(mesh.nodes[n].x() - 0.5) < 1e-12)
            CHECK(sol.u(3 * n) == doctest::Approx(0.5 * delta).epsilon(1e-10));
}

TEST_CASE("equilibrium holds after a solve") {
    const Mesh mesh = makeBox(2, 2, 1);
    const auto points = buildIntegration(mesh);
    const auto prob = uniformElastic(points.size(), 3e10, 0.2);

    BoundaryConditions bc;
    for (const int n : faceNodes(mesh, 0, false))
        for (int d = 0; d < 3; ++d) bc.dirichlet.push_back({n, d, 0.0});
    addFaceTraction(mesh, 0, true, {2e6, 0.0, 0.0}, bc.force);

    const SolveResult sol =
        assembleAndSolve(mesh, points, prob.tangents, prob.epsHat, prob.sigHat, bc);
    const auto eps = strainsAt(points, sol.u);
    std::vector<SymTensor3> sig(points.size());
    for (std::size_t p = 0; p < points.size(); ++p)
        sig[p] = fromVoigtStress(prob.tangents[p] * toVoigtStrain(eps[p]));
    const Eigen::VectorXd fInt = internalForces(mesh.dofCount(), points, sig);

    std::vector<bool> fixed(mesh.dofCount(), false);
    for (const auto& d : bc.dirichlet) fixed[3 * d.node + d.dof] = true;
    double err = 0.0;
    for (std::size_t i = 0; i < mesh.dofCount(); ++i)
        if (!fixed[i]) err = std::max(err, std::abs(fInt(i) - bc.force(i)));
    CHECK(err <= 1e-9 * bc.force.norm());
}

TEST_CASE("assembled stiffness is symmetric") {
    const Mesh mesh = makeBox(2, 2, 2);
    const auto points = buildIntegration(mesh);
    const auto tangent = elasticVoigt(3e10, 0.2);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(mesh.dofCount(), mesh.dofCount());
    for (const auto& ip : points) {
        const Eigen::MatrixXd ke = ip.weight * ip.B.transpose() * tangent * ip.B;
        for (std::size_t i = 0; i < ip.dofs.size(); ++i)
            for (std::size_t j = 0; j < ip.dofs.size(); ++j)
                K(ip.dofs[i], ip.dofs[j]) += ke(i, j);
    }
    CHECK((K - K.transpose()).norm() <= 1e-12 * K.norm());
}

TEST_CASE("singular systems are reported") {
    const Mesh mesh = makeBox(1, 1, 1);
    const auto points = buildIntegration(mesh);
    const auto prob = uniformElastic(points.size(), 3e10, 0.2);
    BoundaryConditions bc;  // rigid modes remain unconstrained
    addFaceTraction(mesh, 0, true, {2e6, 0.0, 0.0}, bc.force);
    CHECK_THROWS_AS(
        assembleAndSolve(mesh, points, prob.tangents, prob.epsHat, prob.sigHat, bc),
        std::runtime_error);
}

TEST_CASE("quarter plate mesh") {
    SUBCASE("hole radius must fit") {
        PlateSpec spec;
        spec.a = 5.0;
        spec.b = 5.0;
        spec.r = 5.0;
        CHECK_THROWS_AS(makeQuarterPlate(spec), std::invalid_argument);
    }
    SUBCASE("volume approaches the analytic value") {
        PlateSpec spec;
        spec.a = 5.0;
        spec.b = 5.0;
        spec.c = 2.0;
        spec.r = 1.0;
        spec.refinement = 3;
        const Mesh mesh = makeQuarterPlate(spec);
        double volume = 0.0;
        for (const auto& ip : buildIntegration(mesh)) volume += ip.weight;
        const double exact = (spec.a * spec.b - M_PI * spec.r * spec.r / 4.0) * spec.c;
        CHECK(std::abs(volume - exact) <= 0.02 * exact);
    }
    SUBCASE("symmetry faces carry nodes") {
        PlateSpec spec;
        const Mesh mesh = makeQuarterPlate(spec);
        CHECK(!faceNodes(mesh, 0, false).empty());
        CHECK(!faceNodes(mesh, 1, false).empty());
        CHECK(!faceNodes(mesh, 2, false).empty());
        CHECK(!faceNodes(mesh, 0, true).empty());
        // All Jacobians positive by construction.
        CHECK(!buildIntegration(mesh).empty());
    }
    SUBCASE("P2 plate is valid too") {
        PlateSpec spec;
        spec.order = 2;
        const Mesh mesh = makeQuarterPlate(spec);
        CHECK(!buildIntegration(mesh).empty());
    }
}

TEST_CASE("mesh text format round trip") {
    const Mesh mesh = makeBox(2, 1, 1, 1.0, 2.0, 0.5, 2);
    const std::string path = "mesh_roundtrip_tmp.txt";
    writeMeshText(path, mesh);
    const Mesh back = readMeshText(path);
    CHECK(back.order == mesh.order);
    REQUIRE(back.nodes.size() == mesh.nodes.size());
    REQUIRE(back.elements.size() == mesh.elements.size());
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n)
        CHECK((back.nodes[n] - mesh.nodes[n]).norm() == 0.0);
    for (std::size_t e = 0; e < mesh.elements.size(); ++e)
        CHECK(back.elements[e] == mesh.elements[e]);
    std::remove(path.c_str());
}

TEST_CASE("duplicate Dirichlet constraints are rejected") {
    const Mesh mesh = makeBox(1, 1, 1);
    BoundaryConditions bc;
    bc.dirichlet.push_back({0, 0, 0.0});
    bc.dirichlet.push_back({0, 0, 1.0});
    CHECK_THROWS_AS(bc.validate(mesh.dofCount()), std::invalid_argument);
}

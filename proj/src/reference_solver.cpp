#include "hwdd/reference_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "hwdd/parallel.hpp"

namespace hwdd {

namespace {

BoundaryConditions lerpBC(const BoundaryConditions& a, const BoundaryConditions& b, double s) {
    if (a.dirichlet.size() != b.dirichlet.size())
        throw std::invalid_argument("ReferenceSolver: Dirichlet layout changed between steps");
    BoundaryConditions out = b;
    for (std::size_t i = 0; i < b.dirichlet.size(); ++i) {
        if (a.dirichlet[i].node != b.dirichlet[i].node ||
            a.dirichlet[i].dof != b.dirichlet[i].dof)
            throw std::invalid_argument("ReferenceSolver: Dirichlet layout changed between steps");
        out.dirichlet[i].value =
            (1.0 - s) * a.dirichlet[i].value + s * b.dirichlet[i].value;
    }
    if (a.force.size() && b.force.size())
        out.force = (1.0 - s) * a.force + s * b.force;
    else if (a.force.size() && !b.force.size())
        out.force = (1.0 - s) * a.force;
    return out;
}

}  // namespace

ReferenceSolver::ReferenceSolver(const Mesh& mesh, const ReferenceMaterial& mat)
    : mesh_(mesh), mat_(mat) {
    mat_.validate();
    points_ = buildIntegration(mesh_);
    eps_.resize(points_.size());
    sig_.resize(points_.size());
    plastic_.resize(points_.size());
    u_ = Eigen::VectorXd::Zero(static_cast<int>(mesh_.dofCount()));
}

bool ReferenceSolver::tryAdvance(const BoundaryConditions& bc) {
    const std::size_t nDof = mesh_.dofCount();
    const Eigen::VectorXd fExt =
        bc.force.size() ? bc.force : Eigen::VectorXd::Zero(static_cast<int>(nDof));

    std::vector<bool> fixed(nDof, false);
    for (const auto& d : bc.dirichlet) fixed[3 * d.node + d.dof] = true;

    Eigen::VectorXd u = u_;
    std::vector<ReturnMapResult> local(points_.size());
    double forceScale = 0.0;

    for (int iter = 0; iter < 40; ++iter) {
        // Return mapping at the current displacement iterate; plastic states
        // commit only when the whole step has converged.
        const std::vector<SymTensor3> eps = strainsAt(points_, u);
        bool ok = true;
        parallelFor(points_.size(), [&](std::size_t p) {
            try {
                local[p] = returnMap(eps[p], plastic_[p], mat_);
            } catch (const std::exception&) {
                ok = false;
            }
        });
        if (!ok) return false;

        std::vector<SymTensor3> sig(points_.size());
        for (std::size_t p = 0; p < points_.size(); ++p) sig[p] = local[p].sigma;
        const Eigen::VectorXd fInt = internalForces(nDof, points_, sig);
        forceScale = std::max({forceScale, fExt.norm(), fInt.norm()});

        double residual = 0.0;
        for (std::size_t i = 0; i < nDof; ++i)
            if (!fixed[i]) residual += std::pow(fExt(static_cast<int>(i)) -
                                                fInt(static_cast<int>(i)), 2);
        residual = std::sqrt(residual);
        const double tol = 1e-8 * std::max(forceScale, 1e-30);
        bool bcSatisfied = true;
        for (const auto& d : bc.dirichlet)
            if (std::abs(u(3 * d.node + d.dof) - d.value) > 0.0) bcSatisfied = false;
        if (residual <= tol && (iter > 0 || bcSatisfied)) {
            u_ = u;
            for (std::size_t p = 0; p < points_.size(); ++p) {
                eps_[p] = eps[p];
                sig_[p] = local[p].sigma;
                plastic_[p] = local[p].state;
            }
            return true;
        }

        // One Newton iterate in total-displacement form: linearize sigma
        // about the current state and solve with the target Dirichlet values.
        std::vector<Eigen::Matrix<double, 6, 6>> tangents(points_.size());
        std::vector<SymTensor3> epsHat(points_.size()), sigHat(points_.size());
        for (std::size_t p = 0; p < points_.size(); ++p) {
            tangents[p] = local[p].tangent.voigtMatrix();
            epsHat[p] = eps[p];
            sigHat[p] = local[p].sigma;
        }
        try {
            u = assembleAndSolve(mesh_, points_, tangents, epsHat, sigHat, bc).u;
        } catch (const std::exception&) {
            return false;
        }
        if (!u.allFinite()) return false;
    }
    return false;
}

void ReferenceSolver::step(const BoundaryConditions& bc) {
    if (lastBC_.dirichlet.empty() && lastBC_.force.size() == 0) {
        // First step: the zero-valued copy of the incoming layout is the
        // natural starting point for bisection.
        lastBC_ = bc;
        for (auto& d : lastBC_.dirichlet) d.value = 0.0;
        if (lastBC_.force.size()) lastBC_.force.setZero();
    }

    struct Target {
        double s0, s1;
    };
    std::vector<Target> stack{{0.0, 1.0}};
    const BoundaryConditions from = lastBC_;
    int splits = 0;
    while (!stack.empty()) {
        const Target t = stack.back();
        stack.pop_back();
        const Eigen::VectorXd uSave = u_;
        const auto epsSave = eps_;
        const auto sigSave = sig_;
        const auto plasticSave = plastic_;
        if (tryAdvance(lerpBC(from, bc, t.s1))) continue;
        u_ = uSave;
        eps_ = epsSave;
        sig_ = sigSave;
        plastic_ = plasticSave;
        if (++splits > 24)
            throw std::runtime_error("ReferenceSolver: Newton diverged, bisection exhausted");
        const double mid = 0.5 * (t.s0 + t.s1);
        stack.push_back({mid, t.s1});
        stack.push_back({t.s0, mid});
    }
    lastBC_ = bc;
}

}  // namespace hwdd

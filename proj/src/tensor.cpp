#include "hwdd/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace hwdd {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;
}  // namespace

double SymTensor3::norm() const {
    return std::sqrt(ddot(*this));
}

StressInvariants invariants(const SymTensor3& sigma) {
    const SymTensor3 s = sigma.deviator();
    StressInvariants inv;
    inv.J1 = sigma.trace();
    inv.J2 = 0.5 * s.ddot(s);
    inv.J3 = s.full().determinant();
    return inv;
}

HWCoords haighWestergaard(const SymTensor3& sigma) {
    const StressInvariants inv = invariants(sigma);
    HWCoords hw;
    hw.xi = inv.J1 / kSqrt3;
    hw.rho = std::sqrt(std::max(2.0 * inv.J2, 0.0));
    if (hw.rho <= 0.0) {
        hw.theta = 0.0;
        hw.degenerate = true;
        return hw;
    }
    // cos(3 theta) = (3 sqrt(3)/2) J3 J2^(-3/2); floating noise can push the
    // argument marginally outside [-1, 1], so clamp before acos.
    double arg = 1.5 * kSqrt3 * inv.J3 / std::pow(inv.J2, 1.5);
    arg = std::clamp(arg, -1.0, 1.0);
    hw.theta = std::acos(arg) / 3.0;
    return hw;
}

std::array<double, 3> reconstructPrincipal(const HWCoords& hw) {
    const double mean = hw.xi / kSqrt3;
    const double amp = std::sqrt(2.0 / 3.0) * hw.rho;
    const double t = hw.theta;
    return {mean + amp * std::cos(t),
            mean + amp * std::cos(t - 2.0 * M_PI / 3.0),
            mean + amp * std::cos(t + 2.0 * M_PI / 3.0)};
}

PrincipalFrame principalFrame(const SymTensor3& sigma) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(sigma.full());
    PrincipalFrame frame;
    // Eigen returns ascending order; flip to descending.
    for (int i = 0; i < 3; ++i) {
        frame.values[i] = solver.eigenvalues()(2 - i);
        frame.rotation.col(i) = solver.eigenvectors().col(2 - i);
    }
    if (frame.rotation.determinant() < 0.0) frame.rotation.col(2) *= -1.0;
    return frame;
}

Voigt6 toVoigtStress(const SymTensor3& t) {
    Voigt6 v;
    v << t.c[0], t.c[1], t.c[2], t.c[3], t.c[4], t.c[5];
    return v;
}

Voigt6 toVoigtStrain(const SymTensor3& t) {
    Voigt6 v;
    v << t.c[0], t.c[1], t.c[2], 2.0 * t.c[3], 2.0 * t.c[4], 2.0 * t.c[5];
    return v;
}

SymTensor3 fromVoigtStress(const Voigt6& v) {
    return SymTensor3{{v(0), v(1), v(2), v(3), v(4), v(5)}};
}

SymTensor3 fromVoigtStrain(const Voigt6& v) {
    return SymTensor3{{v(0), v(1), v(2), 0.5 * v(3), 0.5 * v(4), 0.5 * v(5)}};
}

Voigt6 toMandel(const SymTensor3& t) {
    Voigt6 v;
    v << t.c[0], t.c[1], t.c[2], kSqrt2 * t.c[3], kSqrt2 * t.c[4], kSqrt2 * t.c[5];
    return v;
}

SymTensor3 fromMandel(const Voigt6& v) {
    return SymTensor3{{v(0), v(1), v(2), v(3) / kSqrt2, v(4) / kSqrt2, v(5) / kSqrt2}};
}

Tensor4 Tensor4::identitySym() {
    return Tensor4(Eigen::Matrix<double, 6, 6>::Identity());
}

Tensor4 Tensor4::sphericalOuter() {
    return outer(SymTensor3::identity(), SymTensor3::identity());
}

Tensor4 Tensor4::deviatoricProjector() {
    return identitySym() - sphericalOuter() * (1.0 / 3.0);
}

Tensor4 Tensor4::outer(const SymTensor3& a, const SymTensor3& b) {
    const Voigt6 va = toMandel(a);
    const Voigt6 vb = toMandel(b);
    return Tensor4(va * vb.transpose());
}

Tensor4 Tensor4::symProduct(const SymTensor3& s) {
    // T_ijkl = 1/2 (d_ik s_jl + d_il s_jk + s_ik d_jl + s_il d_jk),
    // the derivative of s.s with respect to s.
    const Eigen::Matrix3d sf = s.full();
    const auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };
    // Index pairs in component order 11,22,33,23,13,12.
    static constexpr int pair[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
    Eigen::Matrix<double, 6, 6> m;
    for (int a2 = 0; a2 < 6; ++a2) {
        const int i = pair[a2][0], j = pair[a2][1];
        const double wi = (a2 < 3) ? 1.0 : kSqrt2;
        for (int b2 = 0; b2 < 6; ++b2) {
            const int k = pair[b2][0], l = pair[b2][1];
            const double wk = (b2 < 3) ? 1.0 : kSqrt2;
            const double t = 0.5 * (delta(i, k) * sf(j, l) + delta(i, l) * sf(j, k) +
                                    sf(i, k) * delta(j, l) + sf(i, l) * delta(j, k));
            m(a2, b2) = wi * wk * t;
        }
    }
    return Tensor4(m);
}

Eigen::Matrix<double, 6, 6> Tensor4::voigtMatrix() const {
    // Mandel weights w = (1,1,1,sqrt2,sqrt2,sqrt2); engineering-strain
    // doubling d = (1,1,1,2,2,2). C_voigt[i][j] = C_mandel[i][j] w_j/(w_i d_j).
    Eigen::Matrix<double, 6, 6> v;
    for (int i = 0; i < 6; ++i) {
        const double wi = (i < 3) ? 1.0 : kSqrt2;
        for (int j = 0; j < 6; ++j) {
            const double wj = (j < 3) ? 1.0 : kSqrt2;
            const double dj = (j < 3) ? 1.0 : 2.0;
            v(i, j) = m_(i, j) * wj / (wi * dj);
        }
    }
    return v;
}

Tensor4 elasticTangent(double lambda, double mu) {
    return Tensor4::sphericalOuter() * lambda + Tensor4::identitySym() * (2.0 * mu);
}

}  // namespace hwdd

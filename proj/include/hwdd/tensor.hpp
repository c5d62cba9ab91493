#ifndef HWDD_TENSOR_HPP
#define HWDD_TENSOR_HPP

#include <array>
#include <cstddef>

#include <Eigen/Dense>

namespace hwdd {

// Component order used throughout: 11, 22, 33, 23, 13, 12.
inline constexpr int kSym11 = 0;
inline constexpr int kSym22 = 1;
inline constexpr int kSym33 = 2;
inline constexpr int kSym23 = 3;
inline constexpr int kSym13 = 4;
inline constexpr int kSym12 = 5;

/// Symmetric second-rank tensor in 3D. Stores the six independent
/// components; the full 3x3 matrix is reconstructed on demand.
struct SymTensor3 {
    std::array<double, 6> c{};

    static SymTensor3 zero() { return SymTensor3{}; }
    static SymTensor3 identity() { return SymTensor3{{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}}; }
    static SymTensor3 diagonal(double a, double b, double d) {
        return SymTensor3{{a, b, d, 0.0, 0.0, 0.0}};
    }

    double operator[](std::size_t i) const { return c[i]; }
    double& operator[](std::size_t i) { return c[i]; }

    double trace() const { return c[0] + c[1] + c[2]; }

    SymTensor3 deviator() const {
        const double p = trace() / 3.0;
        return SymTensor3{{c[0] - p, c[1] - p, c[2] - p, c[3], c[4], c[5]}};
    }

    /// Double contraction a:b; off-diagonal components count twice.
    double ddot(const SymTensor3& o) const {
        return c[0] * o.c[0] + c[1] * o.c[1] + c[2] * o.c[2] +
               2.0 * (c[3] * o.c[3] + c[4] * o.c[4] + c[5] * o.c[5]);
    }

    /// Frobenius norm of the full 3x3 tensor.
    double norm() const;

    Eigen::Matrix3d full() const {
        Eigen::Matrix3d m;
        m << c[0], c[5], c[4],
             c[5], c[1], c[3],
             c[4], c[3], c[2];
        return m;
    }

    static SymTensor3 fromFull(const Eigen::Matrix3d& m) {
        return SymTensor3{{m(0, 0), m(1, 1), m(2, 2),
                           0.5 * (m(1, 2) + m(2, 1)),
                           0.5 * (m(0, 2) + m(2, 0)),
                           0.5 * (m(0, 1) + m(1, 0))}};
    }

    SymTensor3 operator+(const SymTensor3& o) const {
        SymTensor3 r;
        for (int i = 0; i < 6; ++i) r.c[i] = c[i] + o.c[i];
        return r;
    }
    SymTensor3 operator-(const SymTensor3& o) const {
        SymTensor3 r;
        for (int i = 0; i < 6; ++i) r.c[i] = c[i] - o.c[i];
        return r;
    }
    SymTensor3 operator*(double s) const {
        SymTensor3 r;
        for (int i = 0; i < 6; ++i) r.c[i] = c[i] * s;
        return r;
    }
    SymTensor3& operator+=(const SymTensor3& o) {
        for (int i = 0; i < 6; ++i) c[i] += o.c[i];
        return *this;
    }
    SymTensor3& operator-=(const SymTensor3& o) {
        for (int i = 0; i < 6; ++i) c[i] -= o.c[i];
        return *this;
    }
};

inline SymTensor3 operator*(double s, const SymTensor3& t) { return t * s; }

struct StressInvariants {
    double J1;  // tr(sigma)
    double J2;  // 1/2 tr(s.s)
    double J3;  // det(s)
};

StressInvariants invariants(const SymTensor3& sigma);

/// Cylindrical coordinates in principal stress space: xi along the
/// hydrostatic axis, (rho, theta) polar in the deviatoric plane,
/// theta in [0, pi/3]. For purely hydrostatic states rho vanishes and
/// theta is undefined; it is reported as 0 with `degenerate` set.
struct HWCoords {
    double xi = 0.0;
    double rho = 0.0;
    double theta = 0.0;
    bool degenerate = false;
};

HWCoords haighWestergaard(const SymTensor3& sigma);

/// Principal stresses (descending) from Haigh-Westergaard coordinates:
///   sigma_i = xi/sqrt(3) + sqrt(2/3) rho cos(theta - 2 pi (i-1)/3)
std::array<double, 3> reconstructPrincipal(const HWCoords& hw);

/// Eigen-decomposition with descending eigenvalues. `rotation` columns are
/// the corresponding eigenvectors; sigma = T diag(values) T^-1.
struct PrincipalFrame {
    std::array<double, 3> values{};
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

PrincipalFrame principalFrame(const SymTensor3& sigma);

// --- Voigt packing ------------------------------------------------------
//
// Convention: stresses are packed raw, strains with doubled shear
// components (engineering shear). With this split the 6-vector dot
// product voigt(sigma) . voigt(eps) equals the double contraction
// sigma : eps, and 6x6 stiffness matrices act on strain vectors without
// extra scaling.

using Voigt6 = Eigen::Matrix<double, 6, 1>;

Voigt6 toVoigtStress(const SymTensor3& t);
Voigt6 toVoigtStrain(const SymTensor3& t);
SymTensor3 fromVoigtStress(const Voigt6& v);
SymTensor3 fromVoigtStrain(const Voigt6& v);

// Mandel packing (sqrt(2) on shears for both stress and strain) is used
// internally wherever fourth-rank operators act on tensors, since there
// the 6-vector inner product equals the contraction on both sides.
Voigt6 toMandel(const SymTensor3& t);
SymTensor3 fromMandel(const Voigt6& v);

/// Minor-symmetric fourth-rank tensor, stored as its Mandel 6x6 matrix.
class Tensor4 {
public:
    Tensor4() : m_(Eigen::Matrix<double, 6, 6>::Zero()) {}
    explicit Tensor4(const Eigen::Matrix<double, 6, 6>& mandel) : m_(mandel) {}

    /// Symmetric fourth-rank identity (maps a symmetric tensor to itself).
    static Tensor4 identitySym();
    /// I (x) I, the spherical operator: maps t to tr(t) I.
    static Tensor4 sphericalOuter();
    /// Deviatoric projector P = Isym - (1/3) I(x)I.
    static Tensor4 deviatoricProjector();
    /// Dyadic a (x) b: maps t to (b : t) a.
    static Tensor4 outer(const SymTensor3& a, const SymTensor3& b);
    /// Derivative of s.s with respect to s (symmetrized product operator).
    static Tensor4 symProduct(const SymTensor3& s);

    SymTensor3 apply(const SymTensor3& t) const { return fromMandel(m_ * toMandel(t)); }

    const Eigen::Matrix<double, 6, 6>& mandel() const { return m_; }
    Eigen::Matrix<double, 6, 6>& mandel() { return m_; }

    /// 6x6 matrix in the Voigt convention above (acts on engineering-strain
    /// vectors, returns raw stress vectors). This is what assembly consumes.
    Eigen::Matrix<double, 6, 6> voigtMatrix() const;

    Tensor4 operator+(const Tensor4& o) const { return Tensor4(m_ + o.m_); }
    Tensor4 operator-(const Tensor4& o) const { return Tensor4(m_ - o.m_); }
    Tensor4 operator*(double s) const { return Tensor4(m_ * s); }
    Tensor4& operator+=(const Tensor4& o) {
        m_ += o.m_;
        return *this;
    }
    Tensor4& operator-=(const Tensor4& o) {
        m_ -= o.m_;
        return *this;
    }

private:
    Eigen::Matrix<double, 6, 6> m_;
};

inline Tensor4 operator*(double s, const Tensor4& t) { return t * s; }

/// Isotropic elastic stiffness lambda I(x)I + 2 mu Isym.
Tensor4 elasticTangent(double lambda, double mu);

}  // namespace hwdd

#endif

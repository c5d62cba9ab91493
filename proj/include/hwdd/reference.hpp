#ifndef HWDD_REFERENCE_HPP
#define HWDD_REFERENCE_HPP

#include <vector>

#include "hwdd/tensor.hpp"

namespace hwdd {

/// Elasto-plastic reference material: isotropic elasticity, power-law
/// isotropic hardening and a Lode-angle dependent yield criterion
/// controlled by the meridian ratio k (k = 1 recovers von Mises).
struct ReferenceMaterial {
    double E = 3e10;      // Young's modulus [Pa]
    double nu = 0.2;      // Poisson ratio
    double H = 2.5e9;     // hardening modulus [Pa]
    double sigma0 = 3e8;  // initial yield limit [Pa]
    double h = 2.0;       // hardening exponent (power 1/h)
    double k = 0.75;      // yield-surface meridian ratio

    double bulk() const { return E / (3.0 * (1.0 - 2.0 * nu)); }
    double shear() const { return E / (2.0 * (1.0 + nu)); }
    double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
    double mu() const { return shear(); }

    /// Throws std::invalid_argument when any parameter is out of range.
    void validate() const;
};

struct PlasticState {
    SymTensor3 epsP;      // plastic strain (deviatoric)
    double epsBarP = 0.0; // equivalent plastic strain, non-decreasing
};

/// Hardening law: sigma_y(e) = (1 - tan(30 deg)/3) (sigma0 + H e^(1/h)).
/// The prefactor is applied exactly as specified by the material model.
double sigmaY(double epsBarP, const ReferenceMaterial& mat);
double sigmaYPrime(double epsBarP, const ReferenceMaterial& mat);

/// Yield criterion F(sigma) = (rho sqrt(3)/(2 sqrt(2))) *
/// (1 + 1/k - (1 - 1/k) cos 3 theta). Written in invariants this is the
/// globally smooth expression F = A sqrt(J2) - B J3/J2 with
/// A = sqrt(3)(1 + 1/k)/2 and B = (9/4)(1 - 1/k); hydrostatic states give 0.
double yieldF(const SymTensor3& sigma, double k);

/// dF/dsigma (deviatoric); requires J2 > 0.
SymTensor3 yieldFGradient(const SymTensor3& sigma, double k);

/// d2F/dsigma2; requires J2 > 0.
Tensor4 yieldFHessian(const SymTensor3& sigma, double k);

struct ReturnMapResult {
    SymTensor3 sigma;
    PlasticState state;
    Tensor4 tangent;          // consistent (algorithmic) tangent
    double deltaLambda = 0.0; // plastic multiplier == equivalent-strain increment
    bool plastic = false;
    int iterations = 0;
};

/// Fully implicit return mapping: elastic predictor, then a damped Newton
/// solve of sigma = sigma_tr - 2 mu dl * dF/dsigma, F(sigma) = sigma_y,
/// with a bisection fallback on the plastic multiplier. The multiplier is
/// solved as dl = u^2 to remove the infinite initial hardening slope of the
/// power law. Associative flow; the equivalent plastic strain increment is
/// the work-conjugate one (equal to dl since F is 1-homogeneous).
ReturnMapResult returnMap(const SymTensor3& epsTotal, const PlasticState& state,
                          const ReferenceMaterial& mat);

/// One record of a strain-driven uniaxial-stress tensile test.
struct UniaxialStep {
    double eps11 = 0.0;
    double eps22 = 0.0;  // lateral strain from the zero-transverse-stress solve
    double sig11 = 0.0;
    PlasticState state;
};

/// Drive a uniaxial-stress tensile path through the given eps11 sequence,
/// solving the lateral strain so transverse stresses vanish at every step.
std::vector<UniaxialStep> driveUniaxial(const std::vector<double>& eps11Sequence,
                                        const ReferenceMaterial& mat);

}  // namespace hwdd

#endif

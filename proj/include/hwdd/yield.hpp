#ifndef HWDD_YIELD_HPP
#define HWDD_YIELD_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hwdd/tensor.hpp"

namespace hwdd {

/// Fold an arbitrary Lode angle into the principal sector [0, pi/3].
/// Isotropy gives the octahedral trace a 6-fold sector symmetry: period
/// 2 pi/3 with a mirror at pi/3.
double foldTheta(double theta);

/// Radius of the yield locus in the octahedral plane as a function of the
/// Lode angle. Implementations are immutable after construction.
class YieldSurface {
public:
    virtual ~YieldSurface() = default;
    /// Phi(theta); theta is folded into [0, pi/3] before evaluation.
    virtual double phi(double theta) const = 0;
    /// dPhi/dtheta, with the sign chain-ruled through the folding.
    virtual double phiPrime(double theta) const = 0;
};

/// Initial yield surface Phi(theta) = sigma_y0 / ((sqrt3/(2 sqrt2)) *
/// [1 + 1/k - (1 - 1/k) cos 3 theta]). k = 1 degenerates to the von Mises
/// circle of radius sqrt(2/3) sigma_y0.
class AnalyticYield final : public YieldSurface {
public:
    AnalyticYield(double k, double sigmaY0);

    double phi(double theta) const override;
    double phiPrime(double theta) const override;

    double k() const { return k_; }
    double sigmaY0() const { return sigmaY0_; }

private:
    double k_;
    double sigmaY0_;
};

enum class InterpKind { Spline, Linear, Nearest };

InterpKind parseInterpKind(const std::string& name);
std::string interpKindName(InterpKind kind);

/// Yield surface fitted to sampled octahedral points (theta_i, rho_i).
/// Spline interpolation uses clamped cubic pieces with Phi' = 0 enforced at
/// the extreme knots, matching the sector symmetry of isotropic surfaces;
/// outside the knot span the surface extends as a constant. Nearest-neighbor
/// interpolation is piecewise constant with Phi' taken as 0, which degrades
/// the yield normal to the deviator direction.
class FittedYield final : public YieldSurface {
public:
    FittedYield(std::vector<std::pair<double, double>> points, InterpKind kind);

    double phi(double theta) const override;
    double phiPrime(double theta) const override;

    InterpKind kind() const { return kind_; }
    const std::vector<double>& knots() const { return theta_; }
    const std::vector<double>& values() const { return rho_; }

private:
    double evalInSector(double theta) const;
    double evalPrimeInSector(double theta) const;
    std::size_t segmentOf(double theta) const;

    InterpKind kind_;
    std::vector<double> theta_;
    std::vector<double> rho_;
    std::vector<double> moment_;  // spline second derivatives at knots
};

/// Comparison stress alpha = rho / Phi(theta); equals 1 exactly on the
/// initial yield surface, 0 for purely hydrostatic states.
double comparisonStress(const SymTensor3& sigma, const YieldSurface& surface);

/// Unit outward normal of the surface rho(theta) in principal stress space:
///   N = (rho^2 + rho'^2)^(-1/2) [s + sqrt(2/3) rho' (sin t, -cos(pi/6 - t),
///                                                    cos(pi/6 + t))]
/// with s the deviator expressed in principal coordinates. Throws
/// std::domain_error when rho = 0 (no deviatoric direction exists).
Eigen::Vector3d normalOctahedral(double theta, double rho, double rhoPrime,
                                 const Eigen::Vector3d& sPrincipal);

/// Transform a principal-space normal back to Cartesian coordinates:
/// N = T diag(Nhat) T^-1 with T from the stress that produced theta.
SymTensor3 normalCartesian(const Eigen::Vector3d& nHat, const PrincipalFrame& frame);

// Yield-point file: CSV with header `theta,rho` (radians, Pa).
std::vector<std::pair<double, double>> readYieldPointsCsv(const std::string& path);
void writeYieldPointsCsv(const std::string& path,
                         const std::vector<std::pair<double, double>>& points);

}  // namespace hwdd

#endif

#ifndef HWDD_DATA_HPP
#define HWDD_DATA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hwdd/reference.hpp"
#include "hwdd/tensor.hpp"

namespace hwdd {

/// One state of a uniaxial tensile test: eps = diag(e11, e22, e22),
/// sigma = diag(s11, 0, 0).
struct TensileRecord {
    int path = 0;
    int step = 0;
    double eps11 = 0.0;
    double eps22 = 0.0;
    double sig11 = 0.0;

    SymTensor3 strain() const { return SymTensor3::diagonal(eps11, eps22, eps22); }
    SymTensor3 stress() const { return SymTensor3::diagonal(sig11, 0.0, 0.0); }
};

/// Yield point from a combined tension-torsion test; (theta, rho) are the
/// octahedral coordinates of the full stress tensor.
struct TorsionYieldPoint {
    double sig11 = 0.0;
    double sig23 = 0.0;
    double theta = 0.0;
    double rho = 0.0;

    SymTensor3 stress() const {
        SymTensor3 s;
        s[kSym11] = sig11;
        s[kSym23] = sig23;
        return s;
    }
};

/// Tensile-increment record of the extended data set: consecutive strain and
/// stress differences within one path, carrying the hardening variable of the
/// endpoint record and the elastic/inelastic subset tag.
struct ExtDataPoint {
    SymTensor3 dEps;
    SymTensor3 dSig;
    double alpha = 0.0;
    bool inelastic = false;
    int path = 0;
    int step = 0;  // endpoint step index
};

/// Draw sig11 uniformly in [-sigma_y0, k sigma_y0] and solve the yield
/// condition F(sigma) = sigma_y0 for the torsion component. `sigmaY0` is the
/// yield level at zero plastic strain. Root solves that fail to bracket are
/// resampled a bounded number of times before erroring out.
std::vector<TorsionYieldPoint> genTensionTorsion(int n1, double k, double sigmaY0,
                                                 std::uint64_t seed);

struct LoadingSegment {
    double target = 0.0;  // eps11 target at the end of the segment
    int steps = 1;        // relative duration in pseudo-time
};

/// Piecewise-linear eps11 pattern starting from 0.
using LoadingSpec = std::vector<LoadingSegment>;

/// Simulate n_p uniaxial tensile paths with n2 records each by sampling the
/// loading pattern at n2 equally spaced pseudo-times. Path j is the pattern
/// scaled by (j+1)/n_p, so the family covers a range of peak strains.
std::vector<TensileRecord> genTensilePaths(int n2, int np, const ReferenceMaterial& mat,
                                           const LoadingSpec& loading);

/// Extended data set with per-subset indices sorted by the hardening
/// variable; immutable after construction, queries are concurrent-safe.
class ExtendedData {
public:
    ExtendedData() = default;
    explicit ExtendedData(std::vector<ExtDataPoint> points);

    const std::vector<ExtDataPoint>& points() const { return points_; }
    std::size_t subsetSize(bool inelastic) const;

    /// Point of the requested subset minimizing |alpha - alpha_i|. Ties are
    /// broken deterministically: lowest path id, then lowest step index.
    /// Throws std::runtime_error when the subset is empty (data coverage
    /// hole).
    const ExtDataPoint& nearestByAlpha(double alpha, bool inelastic) const;

private:
    std::vector<ExtDataPoint> points_;
    std::vector<std::size_t> elastic_;    // indices sorted by (alpha, path, step)
    std::vector<std::size_t> inelastic_;  // indices sorted by (alpha, path, step)
};

/// Build per-path increments. The hardening variable of the endpoint record
/// is alpha_i = sqrt(2/3) |sig11_i| / phi0; an increment is tagged inelastic
/// iff alpha_i exceeds the running maximum along its path, with the running
/// maximum starting at 1 (the initial yield surface).
ExtendedData buildExtended(const std::vector<TensileRecord>& records, double phi0);

// --- external file formats ----------------------------------------------
// Tensile data: CSV `path,step,eps11,eps22,sig11` (SI units).
// Extended set: CSV `path,step,deps11,deps22,dsig11,alpha,subset`.

void writeTensileCsv(const std::string& path, const std::vector<TensileRecord>& records);
std::vector<TensileRecord> readTensileCsv(const std::string& path);
void writeExtendedCsv(const std::string& path, const ExtendedData& data);

}  // namespace hwdd

#endif

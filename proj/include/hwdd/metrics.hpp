#ifndef HWDD_METRICS_HPP
#define HWDD_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hwdd/config.hpp"
#include "hwdd/tensor.hpp"

namespace hwdd {

/// Weighted energy-norm error of one step:
///   sqrt( sum_e w_e |z_e - z_e_ref|^2 / sum_e w_e |z_e_ref|^2 )
/// with |z|^2 = (E/2) |eps|^2 + (1/(2E)) |sig|^2. Throws when the reference
/// norm vanishes or the layouts disagree.
double stepError(const std::vector<SymTensor3>& eps, const std::vector<SymTensor3>& sig,
                 const std::vector<SymTensor3>& epsRef, const std::vector<SymTensor3>& sigRef,
                 const std::vector<double>& weights, double E);

/// RMSD over the per-step error series: sqrt(sum_k Error_k^2 / T).
double rmsdOf(const std::vector<double>& perStepErrors);

struct StudyRow {
    int n2 = 0;
    int np = 0;
    std::uint64_t seed = 0;
    double rmsd = 0.0;
    int steps = 0;
    std::string mesh;
    double wallclockSeconds = 0.0;
    std::vector<double> perStep;
    bool failed = false;
    std::string error;
};

/// Run the (n2, n_p, seeds) grid from the study section of the config: one
/// shared reference solution per mesh/schedule, one data-driven run per
/// cell. Cells execute independently (parallel-safe); failures are recorded
/// and the study continues. Rows come back in grid order.
std::vector<StudyRow> runStudy(const RunConfig& config);

/// Study CSV: `n2,n_p,seed,rmsd,steps,mesh,wallclock_s`.
void writeStudyCsv(const std::string& path, const std::vector<StudyRow>& rows);

/// Per-step error series CSV: `step,error`.
void writeErrorSeriesCsv(const std::string& path, const std::vector<double>& perStep);

}  // namespace hwdd

#endif

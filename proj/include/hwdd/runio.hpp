#ifndef HWDD_RUNIO_HPP
#define HWDD_RUNIO_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hwdd/fem.hpp"
#include "hwdd/tensor.hpp"

namespace hwdd {

// A run directory contains meta.json, mesh.txt and per-step CSVs
// u_000001.csv (`node,ux,uy,uz`) and gp_000001.csv (point id, weight, the
// six strain and six stress components and alpha_y).

class RunWriter {
public:
    RunWriter(const std::string& dir, const Mesh& mesh, const std::string& solver, double E);

    void writeStep(const Eigen::VectorXd& u, const std::vector<double>& weights,
                   const std::vector<SymTensor3>& eps, const std::vector<SymTensor3>& sig,
                   const std::vector<double>& alphaY);
    /// Writes meta.json; call once after the last step.
    void finish();

    int stepsWritten() const { return steps_; }

private:
    std::string dir_;
    std::string solver_;
    double youngsModulus_;
    std::size_t nodeCount_;
    int steps_ = 0;
};

struct RunData {
    std::string solver;
    double youngsModulus = 0.0;
    int steps = 0;
    Mesh mesh;
    std::vector<double> weights;                  // from the first step file
    std::vector<std::vector<SymTensor3>> eps;     // [step][point]
    std::vector<std::vector<SymTensor3>> sig;
    std::vector<std::vector<double>> alphaY;
    std::vector<Eigen::VectorXd> u;               // [step]
};

RunData readRun(const std::string& dir);

}  // namespace hwdd

#endif

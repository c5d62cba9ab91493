#ifndef HWDD_CONFIG_HPP
#define HWDD_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hwdd/data.hpp"
#include "hwdd/fem.hpp"
#include "hwdd/reference.hpp"
#include "hwdd/yield.hpp"

namespace hwdd {

struct MeshSpec {
    enum class Kind { Cube, Plate, File };
    Kind kind = Kind::Cube;
    // cube
    int nx = 1, ny = 1, nz = 1;
    double lx = 1.0, ly = 1.0, lz = 1.0;
    // plate
    PlateSpec plate;
    // file
    std::string path;
    int order = 1;

    std::string describe() const;
};

Mesh buildMesh(const MeshSpec& spec);

/// Dirichlet constraint on a bounding-box face. `driven` scales the value by
/// the schedule drive d(t); otherwise it is held fixed.
struct FaceBCSpec {
    int axis = 0;
    bool atMax = false;
    std::string dofs = "x";  // subset of "xyz"
    double value = 0.0;
    bool driven = false;
};

struct TractionSpec {
    int axis = 0;
    bool atMax = true;
    Eigen::Vector3d traction = Eigen::Vector3d::Zero();
    bool driven = true;
};

struct ScheduleSegment {
    double target = 0.0;
    int steps = 1;
};

struct DataSpec {
    int n1 = 50;
    int n2 = 100;
    int np = 1;
    std::uint64_t seed = 1;
    InterpKind interpolation = InterpKind::Spline;
    double epsMax = 0.02;
    LoadingSpec pattern;  // targets are multiples of epsMax
    std::string yieldFile;    // optional pre-generated inputs for `run`
    std::string tensileFile;

    LoadingSpec scaledPattern() const;
};

struct StudySpec {
    std::vector<int> n2;
    std::vector<int> np;
    std::vector<std::uint64_t> seeds;
};

struct Tolerances {
    double newtonRel = 1e-8;  // global Newton force residual, relative
    double linearRel = 1e-10; // linear solve residual check, relative
};

struct RunConfig {
    ReferenceMaterial material;
    MeshSpec mesh;
    std::vector<ScheduleSegment> schedule;
    std::vector<FaceBCSpec> dirichlet;
    std::vector<TractionSpec> neumann;
    DataSpec data;
    std::optional<StudySpec> study;
    Tolerances tolerances;
    std::string outputDir = "out";

    bool hasMesh = false;
    bool hasSchedule = false;
    bool hasBC = false;
    bool hasData = false;
};

/// Parse and schema-check a config document; unknown keys are rejected.
RunConfig loadConfig(const std::string& path);
RunConfig parseConfig(const std::string& jsonText);

/// Drive values d(t) for t = 1..T: piecewise linear through the segment
/// targets, starting from 0.
std::vector<double> driveValues(const std::vector<ScheduleSegment>& schedule);

/// Boundary conditions for a given drive value.
BoundaryConditions bcAt(const RunConfig& config, const Mesh& mesh, double drive);

}  // namespace hwdd

#endif

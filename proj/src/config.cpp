#include "hwdd/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hwdd {

namespace {

using nlohmann::json;

void checkKeys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key `" + it.key() + "` in " + where);
}

double requireNumber(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw std::invalid_argument("config: missing numeric `" + key + "` in " + where);
    return j[key].get<double>();
}

int requireInt(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw std::invalid_argument("config: missing integer `" + key + "` in " + where);
    return j[key].get<int>();
}

std::pair<int, bool> parseFace(const std::string& face) {
    if (face.size() != 5 || face[1] != '=')
        throw std::invalid_argument("config: face must look like `x=min` or `z=max`: " + face);
    const char axisChar = face[0];
    const std::string side = face.substr(2);
    int axis;
    if (axisChar == 'x')
        axis = 0;
    else if (axisChar == 'y')
        axis = 1;
    else if (axisChar == 'z')
        axis = 2;
    else
        throw std::invalid_argument("config: bad face axis in " + face);
    if (side == "min") return {axis, false};
    if (side == "max") return {axis, true};
    throw std::invalid_argument("config: face side must be min or max: " + face);
}

ReferenceMaterial parseMaterial(const json& j) {
    checkKeys(j, {"E", "nu", "H", "sigma0", "h", "k"}, "material");
    ReferenceMaterial m;
    m.E = requireNumber(j, "E", "material");
    m.nu = requireNumber(j, "nu", "material");
    m.H = requireNumber(j, "H", "material");
    m.sigma0 = requireNumber(j, "sigma0", "material");
    m.h = requireNumber(j, "h", "material");
    m.k = requireNumber(j, "k", "material");
    m.validate();
    return m;
}

MeshSpec parseMesh(const json& j) {
    MeshSpec spec;
    const std::string kind = j.value("kind", "");
    if (kind == "cube") {
        checkKeys(j, {"kind", "nx", "ny", "nz", "order", "lx", "ly", "lz"}, "mesh");
        spec.kind = MeshSpec::Kind::Cube;
        spec.nx = requireInt(j, "nx", "mesh");
        spec.ny = requireInt(j, "ny", "mesh");
        spec.nz = requireInt(j, "nz", "mesh");
        spec.order = j.value("order", 1);
        spec.lx = j.value("lx", 1.0);
        spec.ly = j.value("ly", 1.0);
        spec.lz = j.value("lz", 1.0);
    } else if (kind == "plate") {
        checkKeys(j, {"kind", "a", "b", "c", "r", "refinement", "order"}, "mesh");
        spec.kind = MeshSpec::Kind::Plate;
        spec.plate.a = requireNumber(j, "a", "mesh");
        spec.plate.b = requireNumber(j, "b", "mesh");
        spec.plate.c = requireNumber(j, "c", "mesh");
        spec.plate.r = j.value("r", 1.0);
        spec.plate.refinement = j.value("refinement", 1);
        spec.plate.order = j.value("order", 1);
        spec.order = spec.plate.order;
    } else if (kind == "file") {
        checkKeys(j, {"kind", "path"}, "mesh");
        spec.kind = MeshSpec::Kind::File;
        if (!j.contains("path")) throw std::invalid_argument("config: mesh file needs `path`");
        spec.path = j["path"].get<std::string>();
    } else {
        throw std::invalid_argument("config: mesh kind must be cube, plate or file");
    }
    return spec;
}

std::vector<ScheduleSegment> parseSchedule(const json& j) {
    checkKeys(j, {"segments"}, "schedule");
    if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty())
        throw std::invalid_argument("config: schedule needs a non-empty `segments` array");
    std::vector<ScheduleSegment> out;
    for (const auto& s : j["segments"]) {
        checkKeys(s, {"target", "steps"}, "schedule segment");
        ScheduleSegment seg;
        seg.target = requireNumber(s, "target", "schedule segment");
        seg.steps = requireInt(s, "steps", "schedule segment");
        if (seg.steps < 1)
            throw std::invalid_argument("config: schedule segment needs steps >= 1");
        out.push_back(seg);
    }
    return out;
}

void parseBC(const json& j, RunConfig& config) {
    checkKeys(j, {"dirichlet", "neumann"}, "bc");
    if (j.contains("dirichlet"))
        for (const auto& d : j["dirichlet"]) {
            checkKeys(d, {"face", "dofs", "value", "driven"}, "bc.dirichlet");
            FaceBCSpec spec;
            std::tie(spec.axis, spec.atMax) = parseFace(d.value("face", ""));
            spec.dofs = d.value("dofs", "x");
            for (char c : spec.dofs)
                if (c != 'x' && c != 'y' && c != 'z')
                    throw std::invalid_argument("config: dofs must be a subset of `xyz`");
            spec.value = d.value("value", 0.0);
            spec.driven = d.value("driven", false);
            config.dirichlet.push_back(spec);
        }
    if (j.contains("neumann"))
        for (const auto& n : j["neumann"]) {
            checkKeys(n, {"face", "traction", "driven"}, "bc.neumann");
            TractionSpec spec;
            std::tie(spec.axis, spec.atMax) = parseFace(n.value("face", ""));
            if (!n.contains("traction") || !n["traction"].is_array() ||
                n["traction"].size() != 3)
                throw std::invalid_argument("config: traction needs a 3-array");
            for (int i = 0; i < 3; ++i) spec.traction(i) = n["traction"][i].get<double>();
            spec.driven = n.value("driven", true);
            config.neumann.push_back(spec);
        }
    if (config.dirichlet.empty())
        throw std::invalid_argument("config: bc needs at least one dirichlet entry");
}

DataSpec parseData(const json& j) {
    checkKeys(j,
              {"n1", "n2", "n_p", "seed", "interpolation", "eps_max", "pattern", "yield_file",
               "tensile_file"},
              "data");
    DataSpec spec;
    spec.n1 = j.value("n1", 50);
    spec.n2 = j.value("n2", 100);
    spec.np = j.value("n_p", 1);
    spec.seed = j.value("seed", std::uint64_t{1});
    spec.interpolation = parseInterpKind(j.value("interpolation", "spline"));
    spec.epsMax = j.value("eps_max", 0.02);
    if (j.contains("pattern")) {
        for (const auto& s : j["pattern"]) {
            checkKeys(s, {"target", "steps"}, "data.pattern segment");
            LoadingSegment seg;
            seg.target = requireNumber(s, "target", "data.pattern");
            seg.steps = requireInt(s, "steps", "data.pattern");
            spec.pattern.push_back(seg);
        }
    }
    if (spec.pattern.empty()) spec.pattern = {{1.0, 1}};
    spec.yieldFile = j.value("yield_file", "");
    spec.tensileFile = j.value("tensile_file", "");
    if (spec.n1 < 2) throw std::invalid_argument("config: data.n1 must be >= 2");
    if (spec.n2 < 2) throw std::invalid_argument("config: data.n2 must be >= 2");
    if (spec.np < 1) throw std::invalid_argument("config: data.n_p must be >= 1");
    if (spec.epsMax <= 0.0) throw std::invalid_argument("config: data.eps_max must be > 0");
    return spec;
}

StudySpec parseStudy(const json& j) {
    checkKeys(j, {"n2", "n_p", "seeds"}, "study");
    StudySpec spec;
    for (const auto& v : j.value("n2", json::array())) spec.n2.push_back(v.get<int>());
    for (const auto& v : j.value("n_p", json::array())) spec.np.push_back(v.get<int>());
    for (const auto& v : j.value("seeds", json::array()))
        spec.seeds.push_back(v.get<std::uint64_t>());
    if (spec.n2.empty() || spec.np.empty() || spec.seeds.empty())
        throw std::invalid_argument("config: study needs non-empty n2, n_p and seeds arrays");
    return spec;
}

}  // namespace

std::string MeshSpec::describe() const {
    std::ostringstream ss;
    switch (kind) {
        case Kind::Cube:
            ss << "cube" << nx << "x" << ny << "x" << nz << "p" << order;
            break;
        case Kind::Plate:
            ss << "plate_r" << plate.r << "_ref" << plate.refinement << "p" << plate.order;
            break;
        case Kind::File:
            ss << path;
            break;
    }
    return ss.str();
}

Mesh buildMesh(const MeshSpec& spec) {
    switch (spec.kind) {
        case MeshSpec::Kind::Cube:
            return makeBox(spec.nx, spec.ny, spec.nz, spec.lx, spec.ly, spec.lz, spec.order);
        case MeshSpec::Kind::Plate:
            return makeQuarterPlate(spec.plate);
        case MeshSpec::Kind::File:
            return readMeshText(spec.path);
    }
    throw std::logic_error("buildMesh: unreachable");
}

LoadingSpec DataSpec::scaledPattern() const {
    LoadingSpec out = pattern;
    for (auto& seg : out) seg.target *= epsMax;
    return out;
}

RunConfig parseConfig(const std::string& jsonText) {
    json j;
    try {
        j = json::parse(jsonText);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
    }
    checkKeys(j, {"material", "mesh", "schedule", "bc", "data", "study", "output_dir"},
              "top level");
    RunConfig config;
    if (!j.contains("material")) throw std::invalid_argument("config: `material` is required");
    config.material = parseMaterial(j["material"]);
    if (j.contains("mesh")) {
        config.mesh = parseMesh(j["mesh"]);
        config.hasMesh = true;
    }
    if (j.contains("schedule")) {
        config.schedule = parseSchedule(j["schedule"]);
        config.hasSchedule = true;
    }
    if (j.contains("bc")) {
        parseBC(j["bc"], config);
        config.hasBC = true;
    }
    if (j.contains("data")) {
        config.data = parseData(j["data"]);
        config.hasData = true;
    }
    if (j.contains("study")) config.study = parseStudy(j["study"]);
    config.outputDir = j.value("output_dir", "out");
    return config;
}

RunConfig loadConfig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parseConfig(buffer.str());
}

std::vector<double> driveValues(const std::vector<ScheduleSegment>& schedule) {
    std::vector<double> out;
    double from = 0.0;
    for (const auto& seg : schedule) {
        for (int i = 1; i <= seg.steps; ++i)
            out.push_back(from + (seg.target - from) * i / seg.steps);
        from = seg.target;
    }
    return out;
}

BoundaryConditions bcAt(const RunConfig& config, const Mesh& mesh, double drive) {
    BoundaryConditions bc;
    for (const auto& spec : config.dirichlet) {
        const double value = spec.driven ? spec.value * drive : spec.value;
        for (const int node : faceNodes(mesh, spec.axis, spec.atMax))
            for (const char c : spec.dofs)
                bc.dirichlet.push_back({node, c - 'x', value});
    }
    // A node can sit on several faces (edges/corners); keep the first entry
    // for each (node, dof).
    std::sort(bc.dirichlet.begin(), bc.dirichlet.end(),
              [](const DirichletBC& a, const DirichletBC& b) {
                  if (a.node != b.node) return a.node < b.node;
                  return a.dof < b.dof;
              });
    std::vector<DirichletBC> unique;
    for (const auto& d : bc.dirichlet) {
        if (!unique.empty() && unique.back().node == d.node && unique.back().dof == d.dof) {
            if (unique.back().value != d.value)
                throw std::invalid_argument("bcAt: conflicting Dirichlet values at a node");
            continue;
        }
        unique.push_back(d);
    }
    bc.dirichlet = std::move(unique);
    for (const auto& spec : config.neumann) {
        const Eigen::Vector3d t = spec.driven ? (spec.traction * drive).eval() : spec.traction;
        addFaceTraction(mesh, spec.axis, spec.atMax, t, bc.force);
    }
    return bc;
}

}  // namespace hwdd

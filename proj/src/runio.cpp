#include "hwdd/runio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hwdd {

namespace {

std::string stepName(const char* prefix, int step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%06d.csv", prefix, step);
    return buf;
}

}  // namespace

RunWriter::RunWriter(const std::string& dir, const Mesh& mesh, const std::string& solver,
                     double E)
    : dir_(dir), solver_(solver), youngsModulus_(E), nodeCount_(mesh.nodes.size()) {
    std::filesystem::create_directories(dir_);
    writeMeshText(dir_ + "/mesh.txt", mesh);
}

void RunWriter::writeStep(const Eigen::VectorXd& u, const std::vector<double>& weights,
                          const std::vector<SymTensor3>& eps, const std::vector<SymTensor3>& sig,
                          const std::vector<double>& alphaY) {
    ++steps_;
    char buf[360];
    {
        std::ofstream out(dir_ + "/" + stepName("u", steps_));
        out << "node,ux,uy,uz\n";
        for (std::size_t n = 0; n < nodeCount_; ++n) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", n, u(3 * n),
                          u(3 * n + 1), u(3 * n + 2));
            out << buf;
        }
    }
    std::ofstream out(dir_ + "/" + stepName("gp", steps_));
    out << "point,weight,eps11,eps22,eps33,eps23,eps13,eps12,"
           "sig11,sig22,sig33,sig23,sig13,sig12,alpha_y\n";
    for (std::size_t p = 0; p < weights.size(); ++p) {
        const auto& e = eps[p].c;
        const auto& s = sig[p].c;
        std::snprintf(buf, sizeof(buf),
                      "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      p, weights[p], e[0], e[1], e[2], e[3], e[4], e[5], s[0], s[1], s[2], s[3],
                      s[4], s[5], alphaY[p]);
        out << buf;
    }
}

void RunWriter::finish() {
    nlohmann::json meta;
    meta["solver"] = solver_;
    meta["steps"] = steps_;
    meta["E"] = youngsModulus_;
    meta["mesh"] = "mesh.txt";
    std::ofstream out(dir_ + "/meta.json");
    out << meta.dump(2) << "\n";
}

RunData readRun(const std::string& dir) {
    std::ifstream metaIn(dir + "/meta.json");
    if (!metaIn) throw std::runtime_error("readRun: no meta.json in " + dir);
    nlohmann::json meta;
    metaIn >> meta;

    RunData run;
    run.solver = meta.value("solver", "");
    run.steps = meta.value("steps", 0);
    run.youngsModulus = meta.value("E", 0.0);
    run.mesh = readMeshText(dir + "/" + meta.value("mesh", std::string("mesh.txt")));

    for (int t = 1; t <= run.steps; ++t) {
        {
            std::ifstream in(dir + "/" + stepName("u", t));
            if (!in) throw std::runtime_error("readRun: missing step displacement file");
            std::string line;
            std::getline(in, line);
            Eigen::VectorXd u(3 * run.mesh.nodes.size());
            std::size_t rows = 0;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::istringstream ss(line);
                std::size_t node;
                char c;
                double ux, uy, uz;
                if (!(ss >> node >> c >> ux >> c >> uy >> c >> uz))
                    throw std::runtime_error("readRun: malformed u line: " + line);
                u(3 * node) = ux;
                u(3 * node + 1) = uy;
                u(3 * node + 2) = uz;
                ++rows;
            }
            if (rows != run.mesh.nodes.size())
                throw std::runtime_error("readRun: displacement file row count mismatch");
            run.u.push_back(std::move(u));
        }
        std::ifstream in(dir + "/" + stepName("gp", t));
        if (!in) throw std::runtime_error("readRun: missing step integration-point file");
        std::string line;
        std::getline(in, line);
        std::vector<SymTensor3> eps, sig;
        std::vector<double> alphaY;
        std::vector<double> weights;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::size_t p;
            char c;
            double w;
            SymTensor3 e, s;
            double ay;
            ss >> p >> c >> w;
            for (int i = 0; i < 6; ++i) ss >> c >> e[i];
            for (int i = 0; i < 6; ++i) ss >> c >> s[i];
            ss >> c >> ay;
            if (!ss) throw std::runtime_error("readRun: malformed gp line: " + line);
            weights.push_back(w);
            eps.push_back(e);
            sig.push_back(s);
            alphaY.push_back(ay);
        }
        if (t == 1)
            run.weights = weights;
        else if (weights.size() != run.weights.size())
            throw std::runtime_error("readRun: integration-point count changed between steps");
        run.eps.push_back(std::move(eps));
        run.sig.push_back(std::move(sig));
        run.alphaY.push_back(std::move(alphaY));
    }
    return run;
}

}  // namespace hwdd

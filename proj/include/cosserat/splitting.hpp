#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosserat/assembly.hpp"
#include "cosserat/material.hpp"
#include "cosserat/mesh.hpp"
#include "cosserat/operator_table.hpp"
#include "cosserat/solver.hpp"

namespace cosserat {

/// Nine nodal scalar fields over a mesh plus the splitting parameter that
/// produced them. Dirichlet-constrained nodes hold exactly 0.
struct FieldSolution {
    double eta = 0.0;
    int n_nodes = 0;
    std::array<std::vector<double>, kNumVars> fields;

    static FieldSolution from_vector(const Eigen::VectorXd& x, int n_nodes, double eta) {
        FieldSolution sol;
        sol.eta = eta;
        sol.n_nodes = n_nodes;
        for (int var = 0; var < kNumVars; ++var) {
            auto& f = sol.fields[static_cast<std::size_t>(var)];
            f.resize(static_cast<std::size_t>(n_nodes));
            for (int k = 0; k < n_nodes; ++k) {
                f[static_cast<std::size_t>(k)] = x[var * n_nodes + k];
            }
        }
        return sol;
    }

    Eigen::VectorXd to_vector() const {
        Eigen::VectorXd x(kNumVars * n_nodes);
        for (int var = 0; var < kNumVars; ++var) {
            for (int k = 0; k < n_nodes; ++k) {
                x[var * n_nodes + k] = fields[static_cast<std::size_t>(var)][static_cast<std::size_t>(k)];
            }
        }
        return x;
    }

    const std::vector<double>& field(int var) const {
        return fields[static_cast<std::size_t>(var)];
    }

    /// P1 value of one field at a point of the given triangle.
    double value_on(const TriMesh& mesh, int var, int tri, std::array<double, 3> bary) const {
        const auto& t = mesh.triangles[static_cast<std::size_t>(tri)];
        const auto& f = fields[static_cast<std::size_t>(var)];
        return bary[0] * f[static_cast<std::size_t>(t[0])] +
               bary[1] * f[static_cast<std::size_t>(t[1])] +
               bary[2] * f[static_cast<std::size_t>(t[2])];
    }
};

struct WorkDensities {
    double w00 = 0.0;
    double w01 = 0.0;
    double w10 = 0.0;
    double w11 = 0.0;

    double denominator() const { return 2.0 * (w11 + w00 - w10 - w01); }
};

struct DegenerateSplit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Load-solution duality integral W = integral(f(eta=i) . v) over the plate,
/// element-wise 3-point mid-edge quadrature.
inline double work_density(int load_eta, const FieldSolution& sol, const TriMesh& mesh,
                           const LoadSpec& load, const MaterialParams& m) {
    if (load_eta != 0 && load_eta != 1) {
        throw std::invalid_argument("work_density: load_eta must be 0 or 1");
    }
    const RhsVector f(load, m, static_cast<double>(load_eta));
    double acc = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const std::array<Vec2, 3> v = {mesh.nodes[static_cast<std::size_t>(tri[0])],
                                       mesh.nodes[static_cast<std::size_t>(tri[1])],
                                       mesh.nodes[static_cast<std::size_t>(tri[2])]};
        const double w = signed_area(v[0], v[1], v[2]) / 3.0;
        const std::array<std::array<int, 2>, 3> edges = {{{0, 1}, {1, 2}, {2, 0}}};
        for (const auto& e : edges) {
            const Vec2 mid = 0.5 * (v[static_cast<std::size_t>(e[0])] + v[static_cast<std::size_t>(e[1])]);
            const auto fq = f(mid);
            for (int i = 0; i < kNumVars; ++i) {
                if (fq[static_cast<std::size_t>(i)] == 0.0) continue;
                const auto& field = sol.fields[static_cast<std::size_t>(i)];
                const double vq = 0.5 * (field[static_cast<std::size_t>(tri[static_cast<std::size_t>(e[0])])] +
                                         field[static_cast<std::size_t>(tri[static_cast<std::size_t>(e[1])])]);
                acc += w * fq[static_cast<std::size_t>(i)] * vq;
            }
        }
    }
    return acc;
}

/// Stationary point of the work quadratic:
/// eta0 = (2 W00 - W10 - W01) / (2 (W11 + W00 - W10 - W01)).
inline double optimal_eta(const WorkDensities& w) {
    const double den = w.denominator();
    const double scale = std::max({std::abs(w.w00), std::abs(w.w01), std::abs(w.w10),
                                   std::abs(w.w11)});
    if (std::abs(den) <= 1e-14 * scale) {
        throw DegenerateSplit("optimal_eta: denominator vanishes (load insensitive to eta)");
    }
    return (2.0 * w.w00 - w.w10 - w.w01) / den;
}

struct SplitReport {
    WorkDensities densities;
    double eta0 = 0.0;
    SolveReport solve_eta0_report;  // solve at eta=0
    SolveReport solve_eta1_report;  // solve at eta=1
    bool degenerate_fallback = false;

    std::string to_text() const {
        std::ostringstream os;
        os.precision(12);
        os << "work densities: W00=" << densities.w00 << " W01=" << densities.w01
           << " W10=" << densities.w10 << " W11=" << densities.w11 << "\n";
        os << "eta0 = " << eta0;
        if (degenerate_fallback) os << "  (degenerate split, fell back to eta=1)";
        os << "\n";
        os << "residuals: eta=0 solve " << solve_eta0_report.relative_residual << " ("
           << solve_eta0_report.method << "), eta=1 solve "
           << solve_eta1_report.relative_residual << " (" << solve_eta1_report.method << ")\n";
        return os.str();
    }
};

/// The splitting algorithm: solve at eta=0 and eta=1, form the four work
/// densities, take the stationary eta0 and combine v = (1-eta0) v0 + eta0 v1.
/// eta0 is not clamped to [0,1]. A degenerate split falls back to eta=1
/// (pure p1 loading), recorded in the report.
inline FieldSolution solve_with_splitting(const TriMesh& mesh, const OperatorTable& table,
                                          const LoadSpec& load, const BcSpec& bc,
                                          const MaterialParams& m, double tol = 1e-10,
                                          SolveMethod method = SolveMethod::direct,
                                          SplitReport* report = nullptr) {
    const RhsVector f0(load, m, 0.0);
    const RhsVector f1(load, m, 1.0);

    auto [x0, rep0] = solve(assemble(mesh, table, rhs_components(f0), bc), tol, method);
    auto [x1, rep1] = solve(assemble(mesh, table, rhs_components(f1), bc), tol, method);
    const FieldSolution v0 = FieldSolution::from_vector(x0, mesh.n_nodes(), 0.0);
    const FieldSolution v1 = FieldSolution::from_vector(x1, mesh.n_nodes(), 1.0);

    WorkDensities w;
    w.w00 = work_density(0, v0, mesh, load, m);
    w.w01 = work_density(0, v1, mesh, load, m);
    w.w10 = work_density(1, v0, mesh, load, m);
    w.w11 = work_density(1, v1, mesh, load, m);

    double eta0 = 1.0;
    bool degenerate = false;
    try {
        eta0 = optimal_eta(w);
    } catch (const DegenerateSplit&) {
        degenerate = true;
    }

    FieldSolution out;
    out.eta = eta0;
    out.n_nodes = mesh.n_nodes();
    for (int var = 0; var < kNumVars; ++var) {
        auto& f = out.fields[static_cast<std::size_t>(var)];
        const auto& a = v0.fields[static_cast<std::size_t>(var)];
        const auto& b = v1.fields[static_cast<std::size_t>(var)];
        f.resize(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            f[k] = (1.0 - eta0) * a[k] + eta0 * b[k];
        }
    }

    if (report) {
        report->densities = w;
        report->eta0 = eta0;
        report->solve_eta0_report = rep0;
        report->solve_eta1_report = rep1;
        report->degenerate_fallback = degenerate;
    }
    return out;
}

}  // namespace cosserat

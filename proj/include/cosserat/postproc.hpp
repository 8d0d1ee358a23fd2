#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "cosserat/assembly.hpp"
#include "cosserat/material.hpp"
#include "cosserat/mesh.hpp"
#include "cosserat/operator_table.hpp"
#include "cosserat/solver.hpp"
#include "cosserat/splitting.hpp"

namespace cosserat {

namespace quadrature {

/// 7-point degree-5 rule on the reference triangle (barycentric, weights
/// normalized to 1; multiply by element area).
struct TriPoint {
    std::array<double, 3> bary;
    double weight;
};

inline const std::array<TriPoint, 7>& degree5() {
    static const std::array<TriPoint, 7> rule = {{
        {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.225},
        {{0.0597158717897698, 0.4701420641051151, 0.4701420641051151}, 0.1323941527885062},
        {{0.4701420641051151, 0.0597158717897698, 0.4701420641051151}, 0.1323941527885062},
        {{0.4701420641051151, 0.4701420641051151, 0.0597158717897698}, 0.1323941527885062},
        {{0.7974269853530873, 0.1012865073234563, 0.1012865073234563}, 0.1259391805448271},
        {{0.1012865073234563, 0.7974269853530873, 0.1012865073234563}, 0.1259391805448271},
        {{0.1012865073234563, 0.1012865073234563, 0.7974269853530873}, 0.1259391805448271},
    }};
    return rule;
}

}  // namespace quadrature

/// Per-element (piecewise constant) stress resultants from the reverse
/// constitutive formulas: bending/twisting moments M, micropolar moments
/// R and R*, shear forces Q, Q*, Q-hat and couple moments S*. Units are
/// force (moments per unit length).
struct ElementResultants {
    double M11 = 0, M22 = 0, M12 = 0, M21 = 0;
    double R11 = 0, R22 = 0, R12 = 0, R21 = 0;
    double Rs11 = 0, Rs22 = 0, Rs12 = 0, Rs21 = 0;
    double Q1 = 0, Q2 = 0;
    double Qs1 = 0, Qs2 = 0;
    double Qh1 = 0, Qh2 = 0;
    double Ss1 = 0, Ss2 = 0;
};

struct ResultantField {
    std::vector<ElementResultants> elements;
};

namespace detail {

struct ElementFieldData {
    std::array<double, kNumVars> value;  // at centroid
    std::array<Vec2, kNumVars> grad;     // constant P1 gradients
    Vec2 centroid;
};

inline ElementFieldData element_field_data(const FieldSolution& sol, const TriMesh& mesh,
                                           int t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const std::array<Vec2, 3> v = {mesh.nodes[static_cast<std::size_t>(tri[0])],
                                   mesh.nodes[static_cast<std::size_t>(tri[1])],
                                   mesh.nodes[static_cast<std::size_t>(tri[2])]};
    const P1Element el = element_matrices(v);
    ElementFieldData data;
    data.centroid = (1.0 / 3.0) * (v[0] + v[1] + v[2]);
    for (int var = 0; var < kNumVars; ++var) {
        const auto& f = sol.fields[static_cast<std::size_t>(var)];
        double val = 0.0;
        Vec2 g{0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            const double fk = f[static_cast<std::size_t>(tri[static_cast<std::size_t>(k)])];
            val += fk / 3.0;
            g = g + fk * el.grad[static_cast<std::size_t>(k)];
        }
        data.value[static_cast<std::size_t>(var)] = val;
        data.grad[static_cast<std::size_t>(var)] = g;
    }
    return data;
}

}  // namespace detail

/// Reverse constitutive evaluation per element: constant P1 gradients,
/// centroid values, and the pressure split p1 = eta*p, p2 = (2/3)(1-eta)*p
/// taken at the element centroid with the eta carried by the solution.
inline ResultantField resultants(const FieldSolution& sol, const TriMesh& mesh,
                                 const MaterialParams& mat, const LoadSpec& load) {
    const double h = mat.thickness;
    const double h3 = h * h * h;
    const double lam = mat.lambda, mu = mat.mu, al = mat.alpha;
    const double be = mat.beta, ga = mat.gamma, ep = mat.epsilon;

    ResultantField out;
    out.elements.resize(static_cast<std::size_t>(mesh.n_triangles()));
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto d = detail::element_field_data(sol, mesh, t);
        auto& r = out.elements[static_cast<std::size_t>(t)];

        const double p = load.pressure(d.centroid);
        const double p1 = sol.eta * p;
        const double p2 = (2.0 / 3.0) * (1.0 - sol.eta) * p;

        const Vec2 gPsi1 = d.grad[kPsi1], gPsi2 = d.grad[kPsi2];
        const Vec2 gW = d.grad[kW], gWs = d.grad[kWstar];
        const Vec2 gO1 = d.grad[kOmega1_0], gO2 = d.grad[kOmega2_0];
        const Vec2 gOh1 = d.grad[kOmegaHat1], gOh2 = d.grad[kOmegaHat2];
        const Vec2 gO3 = d.grad[kOmega3];
        const double Psi1 = d.value[kPsi1], Psi2 = d.value[kPsi2];
        const double O1 = d.value[kOmega1_0], O2 = d.value[kOmega2_0];
        const double Oh1 = d.value[kOmegaHat1], Oh2 = d.value[kOmegaHat2];
        const double O3 = d.value[kOmega3];

        const double bend_diag = h3 * mu * (lam + mu) / (3.0 * (lam + 2.0 * mu));
        const double bend_cross = lam * mu * h3 / (6.0 * (lam + 2.0 * mu));
        const double bend_pressure = (3.0 * p1 + 5.0 * p2) * lam * h * h / (30.0 * (lam + 2.0 * mu));
        r.M11 = bend_diag * gPsi1.x + bend_cross * gPsi2.y + bend_pressure;
        r.M22 = bend_diag * gPsi2.y + bend_cross * gPsi1.x + bend_pressure;

        // M_{beta alpha} = (mu-al) h^3/12 Psi_{alpha,beta} + (al+mu) h^3/12 Psi_{beta,alpha}
        //                  + (-1)^beta al h^3/6 Omega3
        r.M12 = (mu - al) * h3 / 12.0 * gPsi2.x + (al + mu) * h3 / 12.0 * gPsi1.y -
                al * h3 / 6.0 * O3;
        r.M21 = (mu - al) * h3 / 12.0 * gPsi1.y + (al + mu) * h3 / 12.0 * gPsi2.x +
                al * h3 / 6.0 * O3;

        const double mic_diag = 10.0 * h * ga * (be + ga) / (3.0 * (be + 2.0 * ga));
        const double mic_cross = 5.0 * h * be * ga / (3.0 * (be + 2.0 * ga));
        r.R11 = mic_diag * gO1.x + mic_cross * gO2.y;
        r.R22 = mic_diag * gO2.y + mic_cross * gO1.x;
        r.R12 = 5.0 * (ga - ep) * h / 6.0 * gO1.y + 5.0 * h * (ga + ep) / 6.0 * gO2.x;
        r.R21 = 5.0 * (ga - ep) * h / 6.0 * gO2.x + 5.0 * h * (ga + ep) / 6.0 * gO1.y;

        const double mic_s_diag = 8.0 * ga * (ga + be) * h / (3.0 * (be + 2.0 * ga));
        const double mic_s_cross = 4.0 * ga * be * h / (3.0 * (be + 2.0 * ga));
        r.Rs11 = mic_s_diag * gOh1.x + mic_s_cross * gOh2.y;
        r.Rs22 = mic_s_diag * gOh2.y + mic_s_cross * gOh1.x;
        r.Rs12 = 2.0 * (ga - ep) * h / 3.0 * gOh1.y + 2.0 * (ga + ep) * h / 3.0 * gOh2.x;
        r.Rs21 = 2.0 * (ga - ep) * h / 3.0 * gOh2.x + 2.0 * (ga + ep) * h / 3.0 * gOh1.y;

        // Q_alpha carries (-1)^beta, Q*_alpha and Qhat_alpha carry (-1)^alpha.
        const double shear = 5.0 * h * (al + mu) / 6.0;
        const double shear_minus = 5.0 * (mu - al) * h / 6.0;
        const double rot = 5.0 * h * al / 3.0;
        r.Q1 = shear * Psi1 + shear_minus * gW.x + 2.0 * (mu - al) * h / 3.0 * gWs.x +
               rot * (O2 + Oh2);
        r.Q2 = shear * Psi2 + shear_minus * gW.y + 2.0 * (mu - al) * h / 3.0 * gWs.y -
               rot * (O1 + Oh1);

        const double shear_sq = 5.0 * (mu - al) * (mu - al) * h / (6.0 * (mu + al));
        const double hat_ratio = (mu - al) / (mu + al);
        r.Qs1 = shear_minus * Psi1 + shear_sq * gW.x + 2.0 * (mu + al) * h / 3.0 * gWs.x -
                rot * (O2 + hat_ratio * Oh2);
        r.Qs2 = shear_minus * Psi2 + shear_sq * gW.y + 2.0 * (mu + al) * h / 3.0 * gWs.y +
                rot * (O1 + hat_ratio * Oh1);

        const double transverse = 8.0 * al * mu * h / (3.0 * (mu + al));
        r.Qh1 = transverse * gW.x - transverse * Oh2;
        r.Qh2 = transverse * gW.y + transverse * Oh1;

        const double couple = 5.0 * ga * ep * h3 / (3.0 * (ga + ep));
        r.Ss1 = couple * gO3.x;
        r.Ss2 = couple * gO3.y;
    }
    return out;
}

/// Optional nodal averaging of a per-element quantity (visualization only;
/// verification always uses the raw element values).
inline std::vector<double> nodal_average(const TriMesh& mesh, const std::vector<double>& per_element) {
    std::vector<double> acc(static_cast<std::size_t>(mesh.n_nodes()), 0.0);
    std::vector<int> count(static_cast<std::size_t>(mesh.n_nodes()), 0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        for (int v : mesh.triangles[static_cast<std::size_t>(t)]) {
            acc[static_cast<std::size_t>(v)] += per_element[static_cast<std::size_t>(t)];
            count[static_cast<std::size_t>(v)] += 1;
        }
    }
    for (std::size_t k = 0; k < acc.size(); ++k) {
        if (count[k] > 0) acc[k] /= count[k];
    }
    return acc;
}

/// Midplane displacements and microrotations through the thickness,
/// zeta = 2 x3 / h in [-1, 1]:
///   u_alpha = zeta Psi_alpha,  u3 = W + (1 - zeta^2) W*,
///   phi_alpha = Omega0_alpha (1 - zeta^2) + OmegaHat_alpha,  phi3 = zeta Omega3.
struct KinematicFields {
    std::vector<double> u1, u2, u3, phi1, phi2, phi3;
};

inline KinematicFields reconstruct_displacements(const FieldSolution& sol, double zeta) {
    if (!(zeta >= -1.0 && zeta <= 1.0)) {
        throw std::invalid_argument("reconstruct_displacements: zeta must lie in [-1,1]");
    }
    const double shape = 1.0 - zeta * zeta;
    const std::size_t n = static_cast<std::size_t>(sol.n_nodes);
    KinematicFields k;
    k.u1.resize(n), k.u2.resize(n), k.u3.resize(n);
    k.phi1.resize(n), k.phi2.resize(n), k.phi3.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        k.u1[i] = zeta * sol.fields[kPsi1][i];
        k.u2[i] = zeta * sol.fields[kPsi2][i];
        k.u3[i] = sol.fields[kW][i] + shape * sol.fields[kWstar][i];
        k.phi1[i] = shape * sol.fields[kOmega1_0][i] + sol.fields[kOmegaHat1][i];
        k.phi2[i] = shape * sol.fields[kOmega2_0][i] + sol.fields[kOmegaHat2][i];
        k.phi3[i] = zeta * sol.fields[kOmega3][i];
    }
    return k;
}

struct ErrorNorms {
    double l2 = 0.0;
    double h1 = 0.0;
};

/// Summed-over-components errors against analytic fields:
/// eL2^2 = sum_i int (u_i^h - u_i)^2, eH1^2 = eL2^2 + sum_i int |grad diff|^2.
/// Degree-5 quadrature per element.
inline ErrorNorms error_norms(const FieldSolution& sol, const NineFields& exact,
                              const TriMesh& mesh) {
    double l2_sq = 0.0;
    double semi_sq = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const std::array<Vec2, 3> v = {mesh.nodes[static_cast<std::size_t>(tri[0])],
                                       mesh.nodes[static_cast<std::size_t>(tri[1])],
                                       mesh.nodes[static_cast<std::size_t>(tri[2])]};
        const P1Element el = element_matrices(v);
        for (int var = 0; var < kNumVars; ++var) {
            const auto& f = sol.fields[static_cast<std::size_t>(var)];
            const std::array<double, 3> fv = {
                f[static_cast<std::size_t>(tri[0])], f[static_cast<std::size_t>(tri[1])],
                f[static_cast<std::size_t>(tri[2])]};
            Vec2 gh{0.0, 0.0};
            for (int k = 0; k < 3; ++k) {
                gh = gh + fv[static_cast<std::size_t>(k)] * el.grad[static_cast<std::size_t>(k)];
            }
            const auto& field = exact[static_cast<std::size_t>(var)];
            for (const auto& q : quadrature::degree5()) {
                const Vec2 p = q.bary[0] * v[0] + q.bary[1] * v[1] + q.bary[2] * v[2];
                const double uh = q.bary[0] * fv[0] + q.bary[1] * fv[1] + q.bary[2] * fv[2];
                const double diff = uh - field.value(p);
                const Vec2 gdiff = gh - field.gradient(p);
                l2_sq += el.area * q.weight * diff * diff;
                semi_sq += el.area * q.weight * dot(gdiff, gdiff);
            }
        }
    }
    return {std::sqrt(l2_sq), std::sqrt(l2_sq + semi_sq)};
}

/// L2/H1 norms of a discrete P1 nine-field function (used for surrogate-exact
/// comparisons between nested refinement levels; exact closed-form integrals).
inline ErrorNorms fe_norms(const FieldSolution& sol, const TriMesh& mesh) {
    double l2_sq = 0.0;
    double semi_sq = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const std::array<Vec2, 3> v = {mesh.nodes[static_cast<std::size_t>(tri[0])],
                                       mesh.nodes[static_cast<std::size_t>(tri[1])],
                                       mesh.nodes[static_cast<std::size_t>(tri[2])]};
        const P1Element el = element_matrices(v);
        for (int var = 0; var < kNumVars; ++var) {
            const auto& f = sol.fields[static_cast<std::size_t>(var)];
            const std::array<double, 3> d = {f[static_cast<std::size_t>(tri[0])],
                                             f[static_cast<std::size_t>(tri[1])],
                                             f[static_cast<std::size_t>(tri[2])]};
            l2_sq += el.area / 6.0 *
                     (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[0] * d[1] + d[1] * d[2] +
                      d[2] * d[0]);
            Vec2 g{0.0, 0.0};
            for (int k = 0; k < 3; ++k) {
                g = g + d[static_cast<std::size_t>(k)] * el.grad[static_cast<std::size_t>(k)];
            }
            semi_sq += el.area * dot(g, g);
        }
    }
    return {std::sqrt(l2_sq), std::sqrt(l2_sq + semi_sq)};
}

/// Exact prolongation of a P1 solution onto the once-refined mesh.
inline FieldSolution prolongate(const FieldSolution& coarse, const RefinementMap& map) {
    FieldSolution fine;
    fine.eta = coarse.eta;
    fine.n_nodes = static_cast<int>(map.parents.size());
    for (int var = 0; var < kNumVars; ++var) {
        auto& f = fine.fields[static_cast<std::size_t>(var)];
        const auto& c = coarse.fields[static_cast<std::size_t>(var)];
        f.resize(map.parents.size());
        for (std::size_t k = 0; k < map.parents.size(); ++k) {
            const auto& pr = map.parents[k];
            f[k] = 0.5 * (c[static_cast<std::size_t>(pr[0])] + c[static_cast<std::size_t>(pr[1])]);
        }
    }
    return fine;
}

struct ConvergenceLevel {
    int refinements = 0;
    int n_nodes = 0;
    double h_max = 0.0;
    double error_l2 = 0.0;
    double error_h1 = 0.0;
};

struct ErrorReport {
    std::vector<ConvergenceLevel> levels;
    std::vector<double> rates_h1;  // log2(e_k / e_{k+1}) between halvings
    std::vector<double> rates_l2;
};

namespace detail {

inline void fill_rates(ErrorReport& report) {
    report.rates_h1.clear();
    report.rates_l2.clear();
    for (std::size_t k = 0; k + 1 < report.levels.size(); ++k) {
        report.rates_h1.push_back(
            std::log2(report.levels[k].error_h1 / report.levels[k + 1].error_h1));
        report.rates_l2.push_back(
            std::log2(report.levels[k].error_l2 / report.levels[k + 1].error_l2));
    }
}

}  // namespace detail

/// Manufactured-solution convergence study: the right-hand side is the
/// strong operator applied to the exact fields, solved on each refinement
/// level and compared in L2/H1 against the analytic solution.
inline ErrorReport convergence_study_mms(const TriMesh& initial, int refinements,
                                         const OperatorTable& table, const NineFields& exact,
                                         const BcSpec& bc, double tol = 1e-10,
                                         SolveMethod method = SolveMethod::direct) {
    if (refinements < 1) {
        throw std::invalid_argument("convergence_study_mms: need at least 1 refinement");
    }
    const NineComponentFn f = operator_components(table, exact);
    ErrorReport report;
    TriMesh mesh = initial;
    for (int level = 0; level <= refinements; ++level) {
        if (level > 0) mesh = refine_uniform(mesh);
        auto [x, solve_report] = solve(assemble(mesh, table, f, bc), tol, method);
        const FieldSolution sol = FieldSolution::from_vector(x, mesh.n_nodes(), 0.0);
        const ErrorNorms err = error_norms(sol, exact, mesh);
        const MeshMetrics mm = metrics(mesh);
        report.levels.push_back({level, mm.n_nodes, mm.h_max, err.l2, err.h1});
    }
    detail::fill_rates(report);
    return report;
}

/// Analytic-free convergence study for a physical load at fixed eta: each
/// level's solution is compared against the next level's (prolongated
/// exactly through the nested refinement), a Richardson-type surrogate.
inline ErrorReport convergence_study_richardson(const TriMesh& initial, int refinements,
                                                const OperatorTable& table, const LoadSpec& load,
                                                const BcSpec& bc, const MaterialParams& m,
                                                double eta, double tol = 1e-10,
                                                SolveMethod method = SolveMethod::direct) {
    if (refinements < 2) {
        throw std::invalid_argument("convergence_study_richardson: need at least 2 refinements");
    }
    const RhsVector rhs(load, m, eta);
    const NineComponentFn f = rhs_components(rhs);

    std::vector<TriMesh> meshes;
    std::vector<RefinementMap> maps;
    meshes.push_back(initial);
    for (int level = 1; level <= refinements; ++level) {
        RefinementMap map;
        meshes.push_back(refine_uniform(meshes.back(), &map));
        maps.push_back(map);
    }
    std::vector<FieldSolution> solutions;
    for (const auto& mesh : meshes) {
        auto [x, solve_report] = solve(assemble(mesh, table, f, bc), tol, method);
        solutions.push_back(FieldSolution::from_vector(x, mesh.n_nodes(), eta));
    }

    ErrorReport report;
    for (int level = 0; level < refinements; ++level) {
        const auto& fine_mesh = meshes[static_cast<std::size_t>(level + 1)];
        FieldSolution diff = prolongate(solutions[static_cast<std::size_t>(level)],
                                        maps[static_cast<std::size_t>(level)]);
        const auto& fine = solutions[static_cast<std::size_t>(level + 1)];
        for (int var = 0; var < kNumVars; ++var) {
            auto& d = diff.fields[static_cast<std::size_t>(var)];
            const auto& uf = fine.fields[static_cast<std::size_t>(var)];
            for (std::size_t k = 0; k < d.size(); ++k) d[k] -= uf[k];
        }
        const ErrorNorms err = fe_norms(diff, fine_mesh);
        const MeshMetrics mm = metrics(meshes[static_cast<std::size_t>(level)]);
        report.levels.push_back({level, mm.n_nodes, mm.h_max, err.l2, err.h1});
    }
    detail::fill_rates(report);
    return report;
}

/// Top-fiber bending stress 6 M11 / h^2 of the element containing the point.
inline double bending_stress_at(const FieldSolution& sol, const TriMesh& mesh,
                                const MaterialParams& m, const LoadSpec& load, Vec2 at) {
    const PointLocator locator(mesh);
    const auto hit = locator.locate(at);
    if (hit.triangle < 0) {
        throw std::invalid_argument("bending_stress_at: point outside mesh");
    }
    const ResultantField r = resultants(sol, mesh, m, load);
    const double h = m.thickness;
    return 6.0 * std::abs(r.elements[static_cast<std::size_t>(hit.triangle)].M11) / (h * h);
}

/// Stress concentration factor: peak top-fiber bending stress 6 M11 / h^2
/// over hole-rim-adjacent elements, divided by the nominal stress of an
/// identical hole-free plate at the hole-center location.
inline double stress_concentration(const FieldSolution& sol, const TriMesh& mesh,
                                   const MaterialParams& m, const LoadSpec& load,
                                   double nominal) {
    if (!(nominal > 0.0)) {
        throw std::invalid_argument("stress_concentration: nominal must be positive");
    }
    std::set<int> rim_nodes;
    for (const auto& be : mesh.boundary_edges) {
        if (be.tag == kTagHole) {
            rim_nodes.insert(be.a);
            rim_nodes.insert(be.b);
        }
    }
    if (rim_nodes.empty()) {
        throw std::invalid_argument("stress_concentration: mesh has no HOLE-tagged rim");
    }
    const ResultantField r = resultants(sol, mesh, m, load);
    const double h = m.thickness;
    double peak = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const bool adjacent = rim_nodes.count(tri[0]) || rim_nodes.count(tri[1]) ||
                              rim_nodes.count(tri[2]);
        if (!adjacent) continue;
        peak = std::max(peak,
                        6.0 * std::abs(r.elements[static_cast<std::size_t>(t)].M11) / (h * h));
    }
    return peak / nominal;
}

}  // namespace cosserat

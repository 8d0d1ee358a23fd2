#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cosserat/mesh.hpp"
#include "cosserat/postproc.hpp"
#include "cosserat/splitting.hpp"

namespace cosserat {

inline const std::array<std::string, kNumVars>& field_names() {
    static const std::array<std::string, kNumVars> names = {
        "Psi1", "Psi2", "W", "Omega3", "Omega1_0", "Omega2_0", "Wstar", "OmegaHat1", "OmegaHat2"};
    return names;
}

/// One row per node: x,y,Psi1,...,OmegaHat2.
inline void write_fields_csv(std::ostream& os, const FieldSolution& sol, const TriMesh& mesh) {
    os.precision(17);
    os << "x,y";
    for (const auto& name : field_names()) os << "," << name;
    os << "\n";
    for (int k = 0; k < mesh.n_nodes(); ++k) {
        const Vec2 p = mesh.nodes[static_cast<std::size_t>(k)];
        os << p.x << "," << p.y;
        for (int var = 0; var < kNumVars; ++var) {
            os << "," << sol.fields[static_cast<std::size_t>(var)][static_cast<std::size_t>(k)];
        }
        os << "\n";
    }
}

/// One row per element: centroid plus the twenty resultants.
inline void write_resultants_csv(std::ostream& os, const ResultantField& r,
                                 const TriMesh& mesh) {
    os.precision(17);
    os << "xc,yc,M11,M22,M12,M21,R11,R22,R12,R21,Rs11,Rs22,Rs12,Rs21,"
          "Q1,Q2,Qs1,Qs2,Qh1,Qh2,Ss1,Ss2\n";
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const Vec2 c = (1.0 / 3.0) * (mesh.nodes[static_cast<std::size_t>(tri[0])] +
                                      mesh.nodes[static_cast<std::size_t>(tri[1])] +
                                      mesh.nodes[static_cast<std::size_t>(tri[2])]);
        const auto& e = r.elements[static_cast<std::size_t>(t)];
        os << c.x << "," << c.y << "," << e.M11 << "," << e.M22 << "," << e.M12 << "," << e.M21
           << "," << e.R11 << "," << e.R22 << "," << e.R12 << "," << e.R21 << "," << e.Rs11
           << "," << e.Rs22 << "," << e.Rs12 << "," << e.Rs21 << "," << e.Q1 << "," << e.Q2
           << "," << e.Qs1 << "," << e.Qs2 << "," << e.Qh1 << "," << e.Qh2 << "," << e.Ss1
           << "," << e.Ss2 << "\n";
    }
}

/// VTK legacy ASCII unstructured grid: kinematic fields as POINT_DATA
/// scalars, resultants (optional) as CELL_DATA scalars.
inline void write_vtk(std::ostream& os, const FieldSolution& sol, const TriMesh& mesh,
                      const ResultantField* resultant_field = nullptr) {
    os.precision(12);
    os << "# vtk DataFile Version 3.0\n";
    os << "cosserat plate fields\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.n_nodes() << " double\n";
    for (const auto& p : mesh.nodes) os << p.x << " " << p.y << " 0\n";
    os << "CELLS " << mesh.n_triangles() << " " << 4 * mesh.n_triangles() << "\n";
    for (const auto& t : mesh.triangles) {
        os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    }
    os << "CELL_TYPES " << mesh.n_triangles() << "\n";
    for (int t = 0; t < mesh.n_triangles(); ++t) os << "5\n";

    os << "POINT_DATA " << mesh.n_nodes() << "\n";
    for (int var = 0; var < kNumVars; ++var) {
        os << "SCALARS " << field_names()[static_cast<std::size_t>(var)] << " double 1\n";
        os << "LOOKUP_TABLE default\n";
        for (double v : sol.fields[static_cast<std::size_t>(var)]) os << v << "\n";
    }

    if (resultant_field) {
        os << "CELL_DATA " << mesh.n_triangles() << "\n";
        const auto& els = resultant_field->elements;
        auto scalars = [&](const std::string& name, auto getter) {
            os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (const auto& e : els) os << getter(e) << "\n";
        };
        scalars("M11", [](const ElementResultants& e) { return e.M11; });
        scalars("M22", [](const ElementResultants& e) { return e.M22; });
        scalars("M12", [](const ElementResultants& e) { return e.M12; });
        scalars("M21", [](const ElementResultants& e) { return e.M21; });
        scalars("Q1", [](const ElementResultants& e) { return e.Q1; });
        scalars("Q2", [](const ElementResultants& e) { return e.Q2; });
    }
}

/// Rate table in the layout of the convergence studies:
/// Refinements | Number of Nodes | Diameter | Error | Convergence Rate.
inline void write_rate_table(std::ostream& os, const ErrorReport& report, bool h1_norm) {
    os << "Refinements,Number of Nodes,Diameter,Error in " << (h1_norm ? "H1" : "L2")
       << "-norm,Convergence Rate\n";
    os.precision(6);
    for (std::size_t k = 0; k < report.levels.size(); ++k) {
        const auto& lvl = report.levels[k];
        os << lvl.refinements << "," << lvl.n_nodes << "," << std::fixed << lvl.h_max << ",";
        os.unsetf(std::ios_base::floatfield);
        os << (h1_norm ? lvl.error_h1 : lvl.error_l2) << ",";
        if (k > 0) {
            const auto& rates = h1_norm ? report.rates_h1 : report.rates_l2;
            os.precision(2);
            os << std::fixed << rates[k - 1];
            os.unsetf(std::ios_base::floatfield);
            os.precision(6);
        }
        os << "\n";
    }
}

}  // namespace cosserat

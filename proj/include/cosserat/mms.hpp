#pragma once

#include <array>
#include <cmath>

#include "cosserat/assembly.hpp"
#include "cosserat/operator_table.hpp"
#include "cosserat/splitting.hpp"

namespace cosserat {

enum class TrigKind { sine, cosine };

/// amplitude * f(pi x1 / a) * g(pi x2 / a) with f, g sin or cos; closed-form
/// gradient and Hessian.
inline AnalyticField trig_product(double amplitude, TrigKind fx, TrigKind fy, double extent) {
    constexpr double kPi = 3.14159265358979323846;
    const double w = kPi / extent;
    auto f = [](TrigKind k, double t) { return k == TrigKind::sine ? std::sin(t) : std::cos(t); };
    auto df = [](TrigKind k, double t) {
        return k == TrigKind::sine ? std::cos(t) : -std::sin(t);
    };
    AnalyticField field;
    field.value = [=](Vec2 p) { return amplitude * f(fx, w * p.x) * f(fy, w * p.y); };
    field.gradient = [=](Vec2 p) {
        return Vec2{amplitude * w * df(fx, w * p.x) * f(fy, w * p.y),
                    amplitude * w * f(fx, w * p.x) * df(fy, w * p.y)};
    };
    field.hessian = [=](Vec2 p) {
        const double w2 = w * w;
        return std::array<double, 3>{-amplitude * w2 * f(fx, w * p.x) * f(fy, w * p.y),
                                     amplitude * w2 * df(fx, w * p.x) * df(fy, w * p.y),
                                     -amplitude * w2 * f(fx, w * p.x) * f(fy, w * p.y)};
    };
    return field;
}

/// u_i = U_i sin(pi x1/a) sin(pi x2/a): vanishes on the whole rectangle
/// boundary, for the homogeneous-Dirichlet (clamped-space) study.
inline NineFields mms_dirichlet_fields(double extent,
                                       const std::array<double, 9>& amplitudes = {
                                           1, 1, 1, 1, 1, 1, 1, 1, 1}) {
    NineFields u;
    for (int i = 0; i < 9; ++i) {
        u[static_cast<std::size_t>(i)] = trig_product(amplitudes[static_cast<std::size_t>(i)],
                                                      TrigKind::sine, TrigKind::sine, extent);
    }
    return u;
}

/// Manufactured fields compatible with the simply-supported mixed spaces on
/// the square [0,a]^2: each variable uses the sin/cos pattern that satisfies
/// its Dirichlet trace and makes the natural-boundary fluxes vanish.
inline NineFields mms_mixed_fields(double extent, const std::array<double, 9>& amplitudes = {
                                                      1, 1, 1, 1, 1, 1, 1, 1, 1}) {
    auto amp = [&](int var) { return amplitudes[static_cast<std::size_t>(var)]; };
    NineFields u;
    // zero on G3 u G4, natural on G1 u G2: cos * sin
    u[kPsi1] = trig_product(amp(kPsi1), TrigKind::cosine, TrigKind::sine, extent);
    u[kOmega2_0] = trig_product(amp(kOmega2_0), TrigKind::cosine, TrigKind::sine, extent);
    u[kOmegaHat2] = trig_product(amp(kOmegaHat2), TrigKind::cosine, TrigKind::sine, extent);
    // zero on G1 u G2, natural on G3 u G4: sin * cos
    u[kPsi2] = trig_product(amp(kPsi2), TrigKind::sine, TrigKind::cosine, extent);
    u[kOmega1_0] = trig_product(amp(kOmega1_0), TrigKind::sine, TrigKind::cosine, extent);
    u[kOmegaHat1] = trig_product(amp(kOmegaHat1), TrigKind::sine, TrigKind::cosine, extent);
    // zero everywhere: sin * sin
    u[kW] = trig_product(amp(kW), TrigKind::sine, TrigKind::sine, extent);
    u[kWstar] = trig_product(amp(kWstar), TrigKind::sine, TrigKind::sine, extent);
    // natural everywhere: cos * cos
    u[kOmega3] = trig_product(amp(kOmega3), TrigKind::cosine, TrigKind::cosine, extent);
    return u;
}

/// Nodal interpolant of analytic fields (the eta value is just carried).
inline FieldSolution interpolate_fields(const NineFields& u, const TriMesh& mesh,
                                        double eta = 0.0) {
    FieldSolution sol;
    sol.eta = eta;
    sol.n_nodes = mesh.n_nodes();
    for (int var = 0; var < kNumVars; ++var) {
        auto& f = sol.fields[static_cast<std::size_t>(var)];
        f.resize(static_cast<std::size_t>(mesh.n_nodes()));
        for (int k = 0; k < mesh.n_nodes(); ++k) {
            f[static_cast<std::size_t>(k)] =
                u[static_cast<std::size_t>(var)].value(mesh.nodes[static_cast<std::size_t>(k)]);
        }
    }
    return sol;
}

}  // namespace cosserat

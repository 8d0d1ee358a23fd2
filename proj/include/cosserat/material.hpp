#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cosserat {

/// Elastic constants of a Cosserat (micropolar) plate material plus the
/// plate thickness. Units are SI throughout: lambda, mu, alpha in Pa;
/// beta, gamma, epsilon in N; thickness in m.
struct MaterialParams {
    double lambda;
    double mu;
    double alpha;
    double beta;
    double gamma;
    double epsilon;
    double thickness;

    void validate() const {
        auto fail = [](const std::string& what) {
            throw std::domain_error("MaterialParams: " + what);
        };
        if (!(mu > 0.0)) fail("mu must be positive");
        if (!(lambda + 2.0 * mu > 0.0)) fail("lambda+2*mu must be positive");
        if (!(thickness > 0.0)) fail("thickness must be positive");
        // alpha = 0 degenerates the microrotation block to a pure-Neumann
        // operator; the model is only distinct from classical for alpha > 0.
        if (!(alpha > 0.0)) fail("alpha must be strictly positive");
        if (!(gamma + epsilon > 0.0)) fail("gamma+epsilon must be positive");
        if (!(beta + 2.0 * gamma > 0.0)) fail("beta+2*gamma must be positive");
        for (double v : {lambda, mu, alpha, beta, gamma, epsilon, thickness}) {
            if (!std::isfinite(v)) fail("all constants must be finite");
        }
    }
};

/// The fifteen stiffness coefficients of the plate field operator, derived
/// from the material constants, plus the auxiliary constant k1 that scales
/// several operator entries. k1 is configuration-supplied (default 1).
struct StiffnessCoefficients {
    std::array<double, 15> c{};
    double k1 = 1.0;

    /// 1-based access matching the conventional numbering c1..c15.
    double operator()(int i) const { return c[static_cast<std::size_t>(i - 1)]; }
};

inline StiffnessCoefficients derive_coefficients(const MaterialParams& m, double k1 = 1.0) {
    m.validate();
    const double h = m.thickness;
    const double h3 = h * h * h;
    const double lam = m.lambda, mu = m.mu, al = m.alpha;
    const double be = m.beta, ga = m.gamma, ep = m.epsilon;

    StiffnessCoefficients s;
    s.k1 = k1;
    auto& c = s.c;
    c[0] = h3 * mu * (lam + mu) / (3.0 * (lam + 2.0 * mu));
    c[1] = h3 * (al + mu) / 12.0;
    c[2] = 5.0 * h * (al + mu) / 6.0;
    c[3] = 5.0 * h * (al - mu) * (al - mu) / (6.0 * (al + mu));
    c[4] = h * (5.0 * al * al + 6.0 * al * mu + 5.0 * mu * mu) / (6.0 * (al + mu));
    c[5] = h3 * ga * ep / (3.0 * (ga + ep));
    c[6] = 10.0 * h * ga * (be + ga) / (3.0 * (be + 2.0 * ga));
    c[7] = 5.0 * h * (ga + ep) / 6.0;
    c[8] = 10.0 * h * al * al / (3.0 * (al + mu));
    c[9] = 5.0 * h * al * (al - mu) / (3.0 * (al + mu));
    c[10] = 5.0 * h * (al - mu) / 6.0;
    c[11] = h3 * al / 6.0;
    c[12] = 5.0 * h * al / 3.0;
    c[13] = h * al * (5.0 * al + 3.0 * mu) / (3.0 * (al + mu));
    c[14] = 2.0 * h * al * (5.0 * al + 4.0 * mu) / (3.0 * (al + mu));
    for (double v : c) {
        if (!std::isfinite(v)) {
            throw std::domain_error("StiffnessCoefficients: non-finite coefficient");
        }
    }
    return s;
}

}  // namespace cosserat

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cosserat/material.hpp"
#include "cosserat/mesh.hpp"

namespace cosserat {

using Mat2 = std::array<std::array<double, 2>, 2>;

/// One scalar differential term of an operator-table entry.
///   order 0:  coefficient * u
///   order 1:  coefficient * du/dx_direction        (direction in {1,2})
///   order 2:  sum_kl A[k][l] * d2u/dx_k dx_l       (strong form as written)
struct ScalarOperatorTerm {
    int order = 0;
    double coefficient = 0.0;
    int direction = 0;
    Mat2 A{{{0.0, 0.0}, {0.0, 0.0}}};

    static ScalarOperatorTerm zeroth(double c) {
        ScalarOperatorTerm t;
        t.order = 0;
        t.coefficient = c;
        return t;
    }
    static ScalarOperatorTerm first(double c, int axis) {
        ScalarOperatorTerm t;
        t.order = 1;
        t.coefficient = c;
        t.direction = axis;
        return t;
    }
    static ScalarOperatorTerm second(double a11, double a22) {
        ScalarOperatorTerm t;
        t.order = 2;
        t.A[0][0] = a11;
        t.A[1][1] = a22;
        return t;
    }
    /// Mixed term c * d2/dx1dx2, stored with a symmetric off-diagonal A.
    static ScalarOperatorTerm second_mixed(double c) {
        ScalarOperatorTerm t;
        t.order = 2;
        t.A[0][1] = 0.5 * c;
        t.A[1][0] = 0.5 * c;
        return t;
    }

    ScalarOperatorTerm scaled(double s) const {
        ScalarOperatorTerm t = *this;
        t.coefficient *= s;
        for (auto& row : t.A) {
            for (double& v : row) v *= s;
        }
        return t;
    }

    bool is_zero() const {
        return coefficient == 0.0 && A[0][0] == 0.0 && A[0][1] == 0.0 && A[1][0] == 0.0 &&
               A[1][1] == 0.0;
    }
};

using Terms = std::vector<ScalarOperatorTerm>;

/// The 9x9 grid of scalar-operator term lists encoding the plate field
/// operator. Zero entries are empty lists. Variable order:
/// [Psi1, Psi2, W, Omega3, Omega1_0, Omega2_0, Wstar, OmegaHat1, OmegaHat2].
struct OperatorTable {
    std::array<Terms, 81> entries;

    /// 0-based (row, column) access.
    const Terms& entry(int i, int j) const {
        return entries[static_cast<std::size_t>(i * 9 + j)];
    }
    Terms& entry(int i, int j) { return entries[static_cast<std::size_t>(i * 9 + j)]; }
};

inline OperatorTable build_operator_table(const StiffnessCoefficients& sc) {
    const auto& c = sc.c;
    const double k1 = sc.k1;
    const double c1 = c[0], c2 = c[1], c3 = c[2], c4 = c[3], c5 = c[4], c6 = c[5], c7 = c[6],
                 c8 = c[7], c9 = c[8], c10 = c[9], c11 = c[10], c12 = c[11], c13 = c[12],
                 c14 = c[13], c15 = c[14];
    using T = ScalarOperatorTerm;

    const Terms L11 = {T::second(c1, c2), T::zeroth(-c3)};
    const Terms L12 = {T::second_mixed(c1 - c2)};
    const Terms L13 = {T::first(c11, 1)};
    const Terms L14 = {T::first(c12, 2)};
    const Terms L16 = {T::zeroth(c13)};
    const Terms L22 = {T::second(c2, c1), T::zeroth(-c3)};
    const Terms L23 = {T::first(c11, 2)};
    const Terms L24 = {T::first(-c12, 1)};
    const Terms L33 = {T::second(c3, c3)};
    const Terms L35 = {T::first(-c13, 2)};
    const Terms L36 = {T::first(c13, 1)};
    const Terms L38 = {T::first(-c10, 2)};
    const Terms L39 = {T::first(c10, 1)};
    const Terms L41 = {T::first(-c12, 2)};
    const Terms L42 = {T::first(c12, 1)};
    const Terms L44 = {T::second(c6, c6), T::zeroth(-2.0 * c12)};
    const Terms L55 = {T::second(c7, c8), T::zeroth(-2.0 * c13)};
    const Terms L56 = {T::second_mixed(c7 - c8)};
    const Terms L58 = {T::zeroth(-c9)};
    const Terms L66 = {T::second(c8, c7), T::zeroth(-2.0 * c13)};
    const Terms L73 = {T::second(c5, c5)};
    const Terms L77 = {T::second(c4, c4)};
    const Terms L78 = {T::first(-c14, 2)};
    const Terms L79 = {T::first(c14, 1)};
    const Terms L85 = {T::second(c7, c8), T::zeroth(-2.0 * c13)};
    const Terms L88 = {T::second(c7, c8), T::zeroth(-c15)};
    const Terms L99 = {T::second(c8, c7), T::zeroth(-c15)};

    OperatorTable table;
    auto place = [&table](int i, int j, const Terms& terms, double factor = 1.0) {
        Terms& dst = table.entry(i - 1, j - 1);
        for (const auto& t : terms) {
            const auto scaled = t.scaled(factor);
            if (!scaled.is_zero()) dst.push_back(scaled);
        }
    };

    place(1, 1, L11), place(1, 2, L12), place(1, 3, L13), place(1, 4, L14);
    place(1, 6, L16), place(1, 7, L13, k1), place(1, 9, L16);

    place(2, 1, L12), place(2, 2, L22), place(2, 3, L23), place(2, 4, L24);
    place(2, 5, L16), place(2, 7, L23, k1), place(2, 8, L16);

    place(3, 1, L13, -1.0), place(3, 2, L23, -1.0), place(3, 3, L33), place(3, 5, L35);
    place(3, 6, L36), place(3, 7, L77, k1), place(3, 8, L38), place(3, 9, L39);

    place(4, 1, L41), place(4, 2, L42), place(4, 4, L44);

    place(5, 2, L16, -1.0), place(5, 3, L38, -1.0), place(5, 5, L55), place(5, 6, L56);
    place(5, 7, L35, -k1), place(5, 8, L58);

    place(6, 1, L16), place(6, 3, L39, -1.0), place(6, 5, L56), place(6, 6, L66);
    place(6, 7, L36, -k1), place(6, 9, L58);

    place(7, 1, L13, -1.0), place(7, 2, L14, -1.0), place(7, 3, L73), place(7, 5, L35);
    place(7, 6, L36), place(7, 7, L77, k1), place(7, 8, L78), place(7, 9, L79);

    place(8, 2, L16, -1.0), place(8, 3, L78, -1.0), place(8, 5, L85), place(8, 6, L56);
    place(8, 7, L35, -k1), place(8, 8, L88, k1), place(8, 9, L56, k1);

    place(9, 1, L16), place(9, 3, L79, -1.0), place(9, 5, L56), place(9, 6, L55);
    place(9, 7, L36, -k1), place(9, 8, L56, k1), place(9, 9, L99, k1);

    return table;
}

/// Transverse pressure distribution applied to the plate.
class LoadSpec {
public:
    enum class Kind { sinusoidal, uniform, custom };

    static LoadSpec sinusoidal(double amplitude, double extent) {
        if (!(extent > 0.0)) throw std::invalid_argument("LoadSpec: extent must be positive");
        LoadSpec l;
        l.kind_ = Kind::sinusoidal;
        l.amplitude_ = amplitude;
        l.extent_ = extent;
        return l;
    }

    static LoadSpec uniform(double amplitude) {
        LoadSpec l;
        l.kind_ = Kind::uniform;
        l.amplitude_ = amplitude;
        return l;
    }

    /// Caller-supplied pressure and gradient evaluators. The gradient is
    /// spot-checked against central differences at 10 fixed points inside
    /// (0,a)x(0,b), relative tolerance 1e-6.
    static LoadSpec custom(std::function<double(Vec2)> pressure,
                           std::function<Vec2(Vec2)> gradient, double a, double b) {
        LoadSpec l;
        l.kind_ = Kind::custom;
        l.amplitude_ = 1.0;
        l.custom_pressure_ = std::move(pressure);
        l.custom_gradient_ = std::move(gradient);
        l.check_gradient_consistency(a, b);
        return l;
    }

    Kind kind() const { return kind_; }
    double amplitude() const { return amplitude_; }
    double extent() const { return extent_; }

    double pressure(Vec2 p) const {
        switch (kind_) {
            case Kind::uniform:
                return amplitude_;
            case Kind::sinusoidal:
                return amplitude_ * std::sin(kPi * p.x / extent_) * std::sin(kPi * p.y / extent_);
            case Kind::custom:
                return custom_pressure_(p);
        }
        return 0.0;
    }

    Vec2 pressure_gradient(Vec2 p) const {
        switch (kind_) {
            case Kind::uniform:
                return {0.0, 0.0};
            case Kind::sinusoidal: {
                const double w = kPi / extent_;
                return {amplitude_ * w * std::cos(w * p.x) * std::sin(w * p.y),
                        amplitude_ * w * std::sin(w * p.x) * std::cos(w * p.y)};
            }
            case Kind::custom:
                return custom_gradient_(p);
        }
        return {0.0, 0.0};
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    void check_gradient_consistency(double a, double b) const {
        const double step = 1e-6 * std::max(a, b);
        for (int k = 0; k < 10; ++k) {
            // Fixed interior probe points, no randomness anywhere in the pipeline.
            const Vec2 p = {a * (0.08 + 0.09 * k), b * (0.91 - 0.085 * k)};
            const Vec2 g = custom_gradient_(p);
            const Vec2 fd = {
                (custom_pressure_({p.x + step, p.y}) - custom_pressure_({p.x - step, p.y})) /
                    (2.0 * step),
                (custom_pressure_({p.x, p.y + step}) - custom_pressure_({p.x, p.y - step})) /
                    (2.0 * step)};
            const double scale =
                std::max({std::abs(g.x), std::abs(g.y), std::abs(fd.x), std::abs(fd.y), 1e-12});
            if (std::abs(g.x - fd.x) > 1e-6 * scale || std::abs(g.y - fd.y) > 1e-6 * scale) {
                throw std::invalid_argument(
                    "LoadSpec: custom gradient inconsistent with pressure evaluator");
            }
        }
    }

    Kind kind_ = Kind::uniform;
    double amplitude_ = 0.0;
    double extent_ = 1.0;
    std::function<double(Vec2)> custom_pressure_;
    std::function<Vec2(Vec2)> custom_gradient_;
};

/// The nine-component right-hand side f(eta). The initial pressure p is
/// split into p1 = eta*p and p2 = (2/3)(1-eta)*p; components 4,5,6,8,9
/// vanish identically and f is affine in eta at every point.
class RhsVector {
public:
    RhsVector(LoadSpec load, const MaterialParams& m, double eta)
        : load_(std::move(load)), eta_(eta), h_(m.thickness) {
        const double h2 = h_ * h_;
        grad_factor_ = -h2 * m.lambda / (30.0 * (m.lambda + 2.0 * m.mu));
        deflection_factor_ = h2 / 24.0;
    }

    double eta() const { return eta_; }

    std::array<double, 9> operator()(Vec2 p) const {
        std::array<double, 9> f{};
        const double pr = load_.pressure(p);
        const Vec2 gr = load_.pressure_gradient(p);
        const double split1 = eta_;
        const double split2 = (2.0 / 3.0) * (1.0 - eta_);
        // 3*p1 + 5*p2 with p1 = eta*p, p2 = (2/3)(1-eta)*p.
        const double mix = 3.0 * split1 + 5.0 * split2;
        f[0] = grad_factor_ * mix * gr.x;
        f[1] = grad_factor_ * mix * gr.y;
        f[2] = -split1 * pr;
        f[6] = deflection_factor_ * (3.0 * split1 + 4.0 * split2) * pr;
        return f;
    }

    double component(int i, Vec2 p) const { return (*this)(p)[static_cast<std::size_t>(i)]; }

private:
    LoadSpec load_;
    double eta_;
    double h_;
    double grad_factor_;
    double deflection_factor_;
};

/// A scalar field with analytic derivatives up to second order.
/// hessian() returns {d2/dx1dx1, d2/dx1dx2, d2/dx2dx2}.
struct AnalyticField {
    std::function<double(Vec2)> value;
    std::function<Vec2(Vec2)> gradient;
    std::function<std::array<double, 3>(Vec2)> hessian;

    static AnalyticField zero() {
        AnalyticField f;
        f.value = [](Vec2) { return 0.0; };
        f.gradient = [](Vec2) { return Vec2{0.0, 0.0}; };
        f.hessian = [](Vec2) { return std::array<double, 3>{0.0, 0.0, 0.0}; };
        return f;
    }
};

using NineFields = std::array<AnalyticField, 9>;
using ScalarFn = std::function<double(Vec2)>;
using NineComponentFn = std::array<ScalarFn, 9>;

namespace detail {

inline double eval_operator_row(const OperatorTable& table, const NineFields& u, int i,
                                Vec2 p) {
    double acc = 0.0;
    for (int j = 0; j < 9; ++j) {
        const Terms& terms = table.entry(i, j);
        if (terms.empty()) continue;
        for (const auto& t : terms) {
            switch (t.order) {
                case 0:
                    acc += t.coefficient * u[static_cast<std::size_t>(j)].value(p);
                    break;
                case 1: {
                    const Vec2 g = u[static_cast<std::size_t>(j)].gradient(p);
                    acc += t.coefficient * (t.direction == 1 ? g.x : g.y);
                    break;
                }
                case 2: {
                    const auto h = u[static_cast<std::size_t>(j)].hessian(p);
                    acc += t.A[0][0] * h[0] + (t.A[0][1] + t.A[1][0]) * h[1] + t.A[1][1] * h[2];
                    break;
                }
                default:
                    throw std::logic_error("ScalarOperatorTerm: bad order");
            }
        }
    }
    return acc;
}

}  // namespace detail

/// Pointwise application of the strong-form operator to analytic fields;
/// used to manufacture right-hand sides for convergence studies. Table and
/// fields are copied into the returned evaluator.
inline std::function<std::array<double, 9>(Vec2)> apply_operator_analytic(
    const OperatorTable& table, const NineFields& u) {
    auto state = std::make_shared<std::pair<OperatorTable, NineFields>>(table, u);
    return [state](Vec2 p) {
        std::array<double, 9> out{};
        for (int i = 0; i < 9; ++i) {
            out[static_cast<std::size_t>(i)] =
                detail::eval_operator_row(state->first, state->second, i, p);
        }
        return out;
    };
}

inline NineComponentFn rhs_components(const RhsVector& rhs) {
    NineComponentFn f;
    for (int i = 0; i < 9; ++i) {
        f[static_cast<std::size_t>(i)] = [rhs, i](Vec2 p) { return rhs.component(i, p); };
    }
    return f;
}

inline NineComponentFn operator_components(const OperatorTable& table, const NineFields& u) {
    auto state = std::make_shared<std::pair<OperatorTable, NineFields>>(table, u);
    NineComponentFn f;
    for (int i = 0; i < 9; ++i) {
        f[static_cast<std::size_t>(i)] = [state, i](Vec2 p) {
            return detail::eval_operator_row(state->first, state->second, i, p);
        };
    }
    return f;
}

}  // namespace cosserat

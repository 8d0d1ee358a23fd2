#pragma once

#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "cosserat/mesh.hpp"
#include "cosserat/operator_table.hpp"

namespace cosserat {

/// Kinematic variable indices in the solution vector.
inline constexpr int kPsi1 = 0;
inline constexpr int kPsi2 = 1;
inline constexpr int kW = 2;
inline constexpr int kOmega3 = 3;
inline constexpr int kOmega1_0 = 4;
inline constexpr int kOmega2_0 = 5;
inline constexpr int kWstar = 6;
inline constexpr int kOmegaHat1 = 7;
inline constexpr int kOmegaHat2 = 8;
inline constexpr int kNumVars = 9;

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Exact P1 element integrals (all integrands are polynomials of degree <= 2,
/// closed forms are used everywhere; no quadrature error).
struct P1Element {
    double area = 0.0;
    std::array<Vec2, 3> grad{};  // constant basis gradients

    /// (Area/12) [[2,1,1],[1,2,1],[1,1,2]]
    Mat3 mass() const {
        Mat3 m{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) m[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
        }
        return m;
    }

    /// C_mn = integral(phi_m dphi_n/dx_axis) = (Area/3) * dphi_n/dx_axis;
    /// every column is constant. axis in {1,2}.
    Mat3 convection(int axis) const {
        Mat3 m{};
        for (int n = 0; n < 3; ++n) {
            const double g = axis == 1 ? grad[static_cast<std::size_t>(n)].x
                                       : grad[static_cast<std::size_t>(n)].y;
            for (int r = 0; r < 3; ++r) m[r][n] = area / 3.0 * g;
        }
        return m;
    }

    /// S_mn = integral((A grad phi_n) . grad phi_m) = Area * (A grad_n) . grad_m.
    Mat3 stiffness(const Mat2& A) const {
        Mat3 m{};
        for (int n = 0; n < 3; ++n) {
            const Vec2 g = grad[static_cast<std::size_t>(n)];
            const Vec2 Ag = {A[0][0] * g.x + A[0][1] * g.y, A[1][0] * g.x + A[1][1] * g.y};
            for (int r = 0; r < 3; ++r) {
                m[r][n] = area * dot(Ag, grad[static_cast<std::size_t>(r)]);
            }
        }
        return m;
    }
};

inline P1Element element_matrices(const std::array<Vec2, 3>& v) {
    P1Element el;
    el.area = signed_area(v[0], v[1], v[2]);
    double bbox = 0.0;
    for (const auto& p : v) bbox = std::max({bbox, std::abs(p.x), std::abs(p.y)});
    if (!(el.area > 1e-14 * std::max(bbox * bbox, 1e-300))) {
        throw MeshError("element_matrices: degenerate triangle");
    }
    const double inv2a = 1.0 / (2.0 * el.area);
    for (int i = 0; i < 3; ++i) {
        const Vec2 pj = v[static_cast<std::size_t>((i + 1) % 3)];
        const Vec2 pk = v[static_cast<std::size_t>((i + 2) % 3)];
        el.grad[static_cast<std::size_t>(i)] = {(pj.y - pk.y) * inv2a, (pk.x - pj.x) * inv2a};
    }
    return el;
}

enum class BcType : std::uint8_t { dirichlet0, natural };

/// Boundary-condition table: per (variable, segment tag) either homogeneous
/// Dirichlet or natural (do nothing). Natural conditions need no boundary
/// integrals anywhere in scope.
class BcSpec {
public:
    static BcSpec clamped() {
        BcSpec bc;
        bc.default_rule_.fill(BcType::dirichlet0);
        return bc;
    }

    /// Hard simply supported conditions on a rectangle tagged G1..G4:
    /// on G1 u G2 (x1 = 0, a): W, W*, Psi2, Omega1_0, OmegaHat1 fixed;
    /// on G3 u G4 (x2 = 0, b): W, W*, Psi1, Omega2_0, OmegaHat2 fixed;
    /// Omega3 natural everywhere.
    static BcSpec simply_supported() {
        BcSpec bc;
        bc.default_rule_.fill(BcType::natural);
        std::array<BcType, kNumVars> vertical{};
        vertical.fill(BcType::natural);
        for (int var : {kW, kWstar, kPsi2, kOmega1_0, kOmegaHat1}) {
            vertical[static_cast<std::size_t>(var)] = BcType::dirichlet0;
        }
        std::array<BcType, kNumVars> horizontal{};
        horizontal.fill(BcType::natural);
        for (int var : {kW, kWstar, kPsi1, kOmega2_0, kOmegaHat2}) {
            horizontal[static_cast<std::size_t>(var)] = BcType::dirichlet0;
        }
        bc.per_tag_[kTagLeft] = vertical;
        bc.per_tag_[kTagRight] = vertical;
        bc.per_tag_[kTagBottom] = horizontal;
        bc.per_tag_[kTagTop] = horizontal;
        return bc;
    }

    static BcSpec custom(std::array<BcType, kNumVars> fallback) {
        BcSpec bc;
        bc.default_rule_ = fallback;
        return bc;
    }

    BcSpec& set(int tag, int var, BcType type) {
        auto it = per_tag_.find(tag);
        if (it == per_tag_.end()) it = per_tag_.emplace(tag, default_rule_).first;
        it->second[static_cast<std::size_t>(var)] = type;
        return *this;
    }

    BcSpec& set_all(int tag, BcType type) {
        std::array<BcType, kNumVars> rule{};
        rule.fill(type);
        per_tag_[tag] = rule;
        return *this;
    }

    BcType constraint(int var, int tag) const {
        auto it = per_tag_.find(tag);
        const auto& rule = it == per_tag_.end() ? default_rule_ : it->second;
        return rule[static_cast<std::size_t>(var)];
    }

private:
    std::array<BcType, kNumVars> default_rule_{};
    std::map<int, std::array<BcType, kNumVars>> per_tag_;
};

/// Assembled 9m x 9m sparse system in block layout (dof = var*m + node),
/// with the Dirichlet mask already applied: constrained rows and columns are
/// cleared, the diagonal is 1 and the right-hand side entry is 0.
struct BlockSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    std::vector<std::uint8_t> dirichlet;
    int n_nodes = 0;

    int dof(int var, int node) const { return var * n_nodes + node; }
};

inline std::vector<std::uint8_t> dirichlet_mask(const TriMesh& mesh, const BcSpec& bc) {
    const int m = mesh.n_nodes();
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(kNumVars) * static_cast<std::size_t>(m),
                                   0);
    for (const auto& [tag, nodes] : boundary_nodes_by_tag(mesh)) {
        for (int var = 0; var < kNumVars; ++var) {
            if (bc.constraint(var, tag) != BcType::dirichlet0) continue;
            for (int node : nodes) {
                mask[static_cast<std::size_t>(var * m + node)] = 1;
            }
        }
    }
    return mask;
}

/// Galerkin assembly of K and F(eta). Per element and (i,j) block each term
/// scatters coefficient * (element matrix): order 0 -> mass, order 1 ->
/// convection, order 2 -> -stiffness(A) (sign from integration by parts of
/// the +d2 terms as written, test functions vanishing where constrained).
/// Loads are integrated with the 3-point mid-edge rule (degree-2 exact).
/// Deterministic: fixed iteration order, no parallel accumulation.
inline BlockSystem assemble(const TriMesh& mesh, const OperatorTable& table,
                            const NineComponentFn& f, const BcSpec& bc) {
    const int m = mesh.n_nodes();
    const int n = kNumVars * m;

    BlockSystem sys;
    sys.n_nodes = m;
    sys.dirichlet = dirichlet_mask(mesh, bc);
    sys.rhs = Eigen::VectorXd::Zero(n);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 9 * 60);

    for (const auto& tri : mesh.triangles) {
        const std::array<Vec2, 3> verts = {mesh.nodes[static_cast<std::size_t>(tri[0])],
                                           mesh.nodes[static_cast<std::size_t>(tri[1])],
                                           mesh.nodes[static_cast<std::size_t>(tri[2])]};
        const P1Element el = element_matrices(verts);

        for (int i = 0; i < kNumVars; ++i) {
            for (int j = 0; j < kNumVars; ++j) {
                const Terms& terms = table.entry(i, j);
                if (terms.empty()) continue;
                Mat3 block{};
                for (const auto& t : terms) {
                    Mat3 contrib{};
                    switch (t.order) {
                        case 0: {
                            contrib = el.mass();
                            for (auto& row : contrib) {
                                for (double& v : row) v *= t.coefficient;
                            }
                            break;
                        }
                        case 1: {
                            contrib = el.convection(t.direction);
                            for (auto& row : contrib) {
                                for (double& v : row) v *= t.coefficient;
                            }
                            break;
                        }
                        case 2: {
                            contrib = el.stiffness(t.A);
                            for (auto& row : contrib) {
                                for (double& v : row) v = -v;
                            }
                            break;
                        }
                        default:
                            throw std::logic_error("assemble: bad term order");
                    }
                    for (int r = 0; r < 3; ++r) {
                        for (int s = 0; s < 3; ++s) block[r][s] += contrib[r][s];
                    }
                }
                for (int r = 0; r < 3; ++r) {
                    const int row = sys.dof(i, tri[static_cast<std::size_t>(r)]);
                    if (sys.dirichlet[static_cast<std::size_t>(row)]) continue;
                    for (int s = 0; s < 3; ++s) {
                        const int col = sys.dof(j, tri[static_cast<std::size_t>(s)]);
                        if (sys.dirichlet[static_cast<std::size_t>(col)]) continue;
                        triplets.emplace_back(row, col, block[r][s]);
                    }
                }
            }
        }

        // Load blocks: 3-point mid-edge quadrature, weights Area/3. The basis
        // takes values (1/2, 1/2, 0) patterns at the edge midpoints.
        const std::array<Vec2, 3> qp = {0.5 * (verts[0] + verts[1]), 0.5 * (verts[1] + verts[2]),
                                        0.5 * (verts[2] + verts[0])};
        const double w = el.area / 3.0;
        for (int i = 0; i < kNumVars; ++i) {
            const auto& fi = f[static_cast<std::size_t>(i)];
            if (!fi) continue;
            const std::array<double, 3> fq = {fi(qp[0]), fi(qp[1]), fi(qp[2])};
            // phi_0 is 1/2 on midpoints of edges (0,1) and (2,0), 0 on (1,2).
            const std::array<double, 3> integrals = {0.5 * w * (fq[0] + fq[2]),
                                                     0.5 * w * (fq[0] + fq[1]),
                                                     0.5 * w * (fq[1] + fq[2])};
            for (int r = 0; r < 3; ++r) {
                const int row = sys.dof(i, tri[static_cast<std::size_t>(r)]);
                if (!sys.dirichlet[static_cast<std::size_t>(row)]) {
                    sys.rhs[row] += integrals[static_cast<std::size_t>(r)];
                }
            }
        }
    }

    for (int d = 0; d < n; ++d) {
        if (sys.dirichlet[static_cast<std::size_t>(d)]) triplets.emplace_back(d, d, 1.0);
    }

    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();
    return sys;
}

/// Debug dump in MatrixMarket coordinate format.
inline void write_matrix_market(std::ostream& os, const Eigen::SparseMatrix<double>& m) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os.precision(17);
    os << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            os << (it.row() + 1) << " " << (it.col() + 1) << " " << it.value() << "\n";
        }
    }
}

}  // namespace cosserat

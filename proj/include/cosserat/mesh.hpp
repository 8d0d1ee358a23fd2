#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cosserat {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

/// Boundary segment tags. Rectangle sides follow the G1..G4 convention
/// (x1=0, x1=a, x2=0, x2=b); hole rims carry kTagHole.
inline constexpr int kTagLeft = 1;
inline constexpr int kTagRight = 2;
inline constexpr int kTagBottom = 3;
inline constexpr int kTagTop = 4;
inline constexpr int kTagHole = 5;

struct BoundaryEdge {
    int a = 0;
    int b = 0;
    int tag = 0;
};

/// Conforming triangulation: nodes, counterclockwise triangles and tagged
/// boundary edges. Node indices are 0-based. Immutable by convention; all
/// mesh operations are pure functions returning new meshes.
struct TriMesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
};

struct MeshMetrics {
    double h_max = 0.0;
    int n_nodes = 0;
    int n_triangles = 0;
};

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double signed_area(Vec2 p0, Vec2 p1, Vec2 p2) {
    return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

inline double triangle_area(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    return signed_area(mesh.nodes[static_cast<std::size_t>(tri[0])],
                       mesh.nodes[static_cast<std::size_t>(tri[1])],
                       mesh.nodes[static_cast<std::size_t>(tri[2])]);
}

inline double total_area(const TriMesh& mesh) {
    double area = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) area += triangle_area(mesh, t);
    return area;
}

namespace detail {

inline std::pair<int, int> sorted_edge(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

/// Edge -> number of incident triangles.
inline std::map<std::pair<int, int>, int> edge_incidence(const TriMesh& mesh) {
    std::map<std::pair<int, int>, int> inc;
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            inc[sorted_edge(tri[e], tri[(e + 1) % 3])] += 1;
        }
    }
    return inc;
}

}  // namespace detail

inline int count_edges(const TriMesh& mesh) {
    return static_cast<int>(detail::edge_incidence(mesh).size());
}

/// Throws MeshError unless the mesh satisfies the triangulation invariants:
/// valid indices, positive (CCW) areas, edge conformity, and a boundary-edge
/// list that matches exactly the edges incident to a single triangle.
inline void validate_mesh(const TriMesh& mesh) {
    const int m = mesh.n_nodes();
    double bbox = 0.0;
    for (const auto& p : mesh.nodes) bbox = std::max({bbox, std::abs(p.x), std::abs(p.y)});
    const double area_floor = 1e-14 * std::max(bbox * bbox, 1e-300);

    for (const auto& tri : mesh.triangles) {
        for (int v : tri) {
            if (v < 0 || v >= m) throw MeshError("triangle references node out of range");
        }
        const double area = signed_area(mesh.nodes[static_cast<std::size_t>(tri[0])],
                                        mesh.nodes[static_cast<std::size_t>(tri[1])],
                                        mesh.nodes[static_cast<std::size_t>(tri[2])]);
        if (!(area > area_floor)) {
            throw MeshError("degenerate or clockwise triangle (area <= 0)");
        }
    }

    const auto inc = detail::edge_incidence(mesh);
    for (const auto& [edge, count] : inc) {
        if (count > 2) throw MeshError("non-conforming mesh: edge shared by >2 triangles");
    }
    std::set<std::pair<int, int>> listed;
    for (const auto& be : mesh.boundary_edges) {
        if (be.a < 0 || be.a >= m || be.b < 0 || be.b >= m) {
            throw MeshError("boundary edge references node out of range");
        }
        const auto key = detail::sorted_edge(be.a, be.b);
        auto it = inc.find(key);
        if (it == inc.end() || it->second != 1) {
            throw MeshError("boundary edge does not belong to exactly one triangle");
        }
        if (!listed.insert(key).second) throw MeshError("duplicate boundary edge");
    }
    for (const auto& [edge, count] : inc) {
        if (count == 1 && listed.find(edge) == listed.end()) {
            throw MeshError("untagged boundary edge (hull edge missing from boundary list)");
        }
    }
}

inline MeshMetrics metrics(const TriMesh& mesh) {
    MeshMetrics out;
    out.n_nodes = mesh.n_nodes();
    out.n_triangles = mesh.n_triangles();
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const Vec2 d = mesh.nodes[static_cast<std::size_t>(tri[(e + 1) % 3])] -
                           mesh.nodes[static_cast<std::size_t>(tri[e])];
            out.h_max = std::max(out.h_max, norm(d));
        }
    }
    return out;
}

/// Structured triangulation of [0,a] x [0,b] with nx*ny cells, each split
/// along the lower-left to upper-right diagonal. For nx == ny and a == b the
/// triangle set is invariant under the coordinate swap (x1,x2) -> (x2,x1).
inline TriMesh generate_rectangle(double a, double b, int nx, int ny) {
    if (!(a > 0.0) || !(b > 0.0)) throw MeshError("generate_rectangle: a,b must be positive");
    if (nx < 1 || ny < 1) throw MeshError("generate_rectangle: nx,ny must be >= 1");

    TriMesh mesh;
    mesh.nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            mesh.nodes.push_back({a * i / nx, b * j / ny});
        }
    }
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };

    mesh.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    for (int j = 0; j < ny; ++j) {
        mesh.boundary_edges.push_back({id(0, j), id(0, j + 1), kTagLeft});
        mesh.boundary_edges.push_back({id(nx, j), id(nx, j + 1), kTagRight});
    }
    for (int i = 0; i < nx; ++i) {
        mesh.boundary_edges.push_back({id(i, 0), id(i + 1, 0), kTagBottom});
        mesh.boundary_edges.push_back({id(i, ny), id(i + 1, ny), kTagTop});
    }
    return mesh;
}

/// Maps each node of a refined mesh to the parent node pair it interpolates:
/// parents[i] == {i, i} for carried-over coarse nodes, {a, b} for the
/// midpoint of coarse edge (a, b). Enables exact prolongation of P1 fields.
struct RefinementMap {
    std::vector<std::array<int, 2>> parents;
};

/// Uniform red refinement: every triangle is replaced by 4 congruent
/// children using edge midpoints as new nodes. Boundary tags are inherited
/// and h_max halves. Midpoints are not snapped to curved rims.
inline TriMesh refine_uniform(const TriMesh& mesh, RefinementMap* map = nullptr) {
    TriMesh fine;
    fine.nodes = mesh.nodes;
    if (map) {
        map->parents.clear();
        for (int i = 0; i < mesh.n_nodes(); ++i) map->parents.push_back({i, i});
    }

    std::map<std::pair<int, int>, int> midpoint;
    auto midpoint_of = [&](int a, int b) {
        const auto key = detail::sorted_edge(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int id = fine.n_nodes();
        fine.nodes.push_back(0.5 * (mesh.nodes[static_cast<std::size_t>(a)] +
                                    mesh.nodes[static_cast<std::size_t>(b)]));
        if (map) map->parents.push_back({key.first, key.second});
        midpoint.emplace(key, id);
        return id;
    };

    fine.triangles.reserve(4 * mesh.triangles.size());
    for (const auto& tri : mesh.triangles) {
        const int m01 = midpoint_of(tri[0], tri[1]);
        const int m12 = midpoint_of(tri[1], tri[2]);
        const int m20 = midpoint_of(tri[2], tri[0]);
        fine.triangles.push_back({tri[0], m01, m20});
        fine.triangles.push_back({tri[1], m12, m01});
        fine.triangles.push_back({tri[2], m20, m12});
        fine.triangles.push_back({m01, m12, m20});
    }
    fine.boundary_edges.reserve(2 * mesh.boundary_edges.size());
    for (const auto& be : mesh.boundary_edges) {
        const int mid = midpoint_of(be.a, be.b);
        fine.boundary_edges.push_back({be.a, mid, be.tag});
        fine.boundary_edges.push_back({mid, be.b, be.tag});
    }
    return fine;
}

/// Deterministic structured-ring (O-grid) triangulation of a rectangle with
/// a circular hole. Ring 0 polygonalizes the rim (chord error <= density^2/(8r));
/// rays from the hole center sweep out to the rectangle perimeter, with the
/// four corner directions inserted so the outer boundary is exact.
inline TriMesh generate_plate_with_hole(double a, double b, double r, Vec2 center,
                                        double density) {
    if (!(a > 0.0) || !(b > 0.0)) throw MeshError("plate_with_hole: a,b must be positive");
    if (!(r > 0.0)) throw MeshError("plate_with_hole: hole radius must be positive");
    if (!(density > 0.0)) throw MeshError("plate_with_hole: density must be positive");
    if (!(center.x - r > 0.0) || !(center.x + r < a) ||
        !(center.y - r > 0.0) || !(center.y + r < b)) {
        throw MeshError("plate_with_hole: hole touches or crosses the rectangle boundary");
    }

    constexpr double kPi = 3.14159265358979323846;
    const int n_theta = std::max(16, static_cast<int>(std::ceil(2.0 * kPi * r / density)));

    std::vector<double> thetas;
    thetas.reserve(static_cast<std::size_t>(n_theta) + 4);
    for (int i = 0; i < n_theta; ++i) thetas.push_back(2.0 * kPi * i / n_theta);
    const std::array<Vec2, 4> corners = {{{0, 0}, {a, 0}, {a, b}, {0, b}}};
    for (const auto& corner : corners) {
        double th = std::atan2(corner.y - center.y, corner.x - center.x);
        if (th < 0.0) th += 2.0 * kPi;
        thetas.push_back(th);
    }
    std::sort(thetas.begin(), thetas.end());
    // Merge near-duplicates so corner insertion cannot create sliver sectors.
    std::vector<double> th;
    const double min_gap = 0.25 * (2.0 * kPi / n_theta);
    for (double t : thetas) {
        if (th.empty() || t - th.back() > min_gap) th.push_back(t);
    }
    while (th.size() > 1 && (2.0 * kPi + th.front()) - th.back() <= min_gap) th.pop_back();
    const int nt = static_cast<int>(th.size());

    // Ray from the hole center to the rectangle perimeter.
    auto outer_point = [&](double theta) {
        const double cx = std::cos(theta), cy = std::sin(theta);
        double t = std::numeric_limits<double>::max();
        if (cx > 1e-15) t = std::min(t, (a - center.x) / cx);
        if (cx < -1e-15) t = std::min(t, (0.0 - center.x) / cx);
        if (cy > 1e-15) t = std::min(t, (b - center.y) / cy);
        if (cy < -1e-15) t = std::min(t, (0.0 - center.y) / cy);
        Vec2 p = {center.x + t * cx, center.y + t * cy};
        // Snap onto the perimeter so side classification is exact.
        if (std::abs(p.x) < 1e-12 * a) p.x = 0.0;
        if (std::abs(p.x - a) < 1e-12 * a) p.x = a;
        if (std::abs(p.y) < 1e-12 * b) p.y = 0.0;
        if (std::abs(p.y - b) < 1e-12 * b) p.y = b;
        return p;
    };

    double max_span = 0.0;
    std::vector<Vec2> rim(static_cast<std::size_t>(nt)), outer(static_cast<std::size_t>(nt));
    for (int i = 0; i < nt; ++i) {
        rim[static_cast<std::size_t>(i)] = {center.x + r * std::cos(th[static_cast<std::size_t>(i)]),
                                            center.y + r * std::sin(th[static_cast<std::size_t>(i)])};
        outer[static_cast<std::size_t>(i)] = outer_point(th[static_cast<std::size_t>(i)]);
        max_span = std::max(max_span, norm(outer[static_cast<std::size_t>(i)] -
                                           rim[static_cast<std::size_t>(i)]));
    }
    const int n_r = std::max(2, static_cast<int>(std::ceil(max_span / density)));

    TriMesh mesh;
    mesh.nodes.reserve(static_cast<std::size_t>(nt * (n_r + 1)));
    for (int j = 0; j <= n_r; ++j) {
        const double s = static_cast<double>(j) / n_r;
        for (int i = 0; i < nt; ++i) {
            mesh.nodes.push_back((1.0 - s) * rim[static_cast<std::size_t>(i)] +
                                 s * outer[static_cast<std::size_t>(i)]);
        }
    }
    auto id = [nt](int i, int j) { return j * nt + (i % nt); };

    for (int j = 0; j < n_r; ++j) {
        for (int i = 0; i < nt; ++i) {
            mesh.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            mesh.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }

    for (int i = 0; i < nt; ++i) {
        mesh.boundary_edges.push_back({id(i + 1, 0), id(i, 0), kTagHole});
    }
    auto side_of = [&](Vec2 p, Vec2 q) {
        if (p.x == 0.0 && q.x == 0.0) return kTagLeft;
        if (p.x == a && q.x == a) return kTagRight;
        if (p.y == 0.0 && q.y == 0.0) return kTagBottom;
        if (p.y == b && q.y == b) return kTagTop;
        throw MeshError("plate_with_hole: outer edge not on a rectangle side");
    };
    for (int i = 0; i < nt; ++i) {
        const int u = id(i, n_r), v = id(i + 1, n_r);
        mesh.boundary_edges.push_back(
            {u, v, side_of(mesh.nodes[static_cast<std::size_t>(u)],
                           mesh.nodes[static_cast<std::size_t>(v)])});
    }

    validate_mesh(mesh);
    return mesh;
}

/// Nodes lying on boundary segments, grouped by tag (sorted, unique).
inline std::map<int, std::vector<int>> boundary_nodes_by_tag(const TriMesh& mesh) {
    std::map<int, std::set<int>> sets;
    for (const auto& be : mesh.boundary_edges) {
        sets[be.tag].insert(be.a);
        sets[be.tag].insert(be.b);
    }
    std::map<int, std::vector<int>> out;
    for (auto& [tag, s] : sets) out[tag].assign(s.begin(), s.end());
    return out;
}

// --- native mesh text format ------------------------------------------------
//
//   tri-mesh v1
//   nodes N        (N lines "x y")
//   triangles L    (L lines "i j k")
//   bedges B       (B lines "i j tag")

inline void write_tri_mesh(std::ostream& os, const TriMesh& mesh) {
    os.precision(17);
    os << "tri-mesh v1\n";
    os << "nodes " << mesh.n_nodes() << "\n";
    for (const auto& p : mesh.nodes) os << p.x << " " << p.y << "\n";
    os << "triangles " << mesh.n_triangles() << "\n";
    for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "bedges " << mesh.boundary_edges.size() << "\n";
    for (const auto& be : mesh.boundary_edges) os << be.a << " " << be.b << " " << be.tag << "\n";
}

inline TriMesh read_tri_mesh(std::istream& is) {
    auto fail = [](int line, const std::string& what) {
        throw MeshError("tri-mesh parse error at line " + std::to_string(line) + ": " + what);
    };
    int line = 0;
    std::string buf;
    auto next_line = [&]() {
        if (!std::getline(is, buf)) fail(line + 1, "unexpected end of file");
        ++line;
        return std::istringstream(buf);
    };

    {
        auto ls = next_line();
        std::string word, ver;
        ls >> word >> ver;
        if (word != "tri-mesh" || ver != "v1") fail(line, "expected header 'tri-mesh v1'");
    }
    TriMesh mesh;
    auto read_count = [&](const std::string& keyword) {
        auto ls = next_line();
        std::string word;
        int count = -1;
        ls >> word >> count;
        if (word != keyword || count < 0) fail(line, "expected '" + keyword + " N'");
        return count;
    };
    const int n = read_count("nodes");
    for (int i = 0; i < n; ++i) {
        auto ls = next_line();
        Vec2 p;
        if (!(ls >> p.x >> p.y)) fail(line, "expected 'x y'");
        mesh.nodes.push_back(p);
    }
    const int l = read_count("triangles");
    for (int i = 0; i < l; ++i) {
        auto ls = next_line();
        std::array<int, 3> t{};
        if (!(ls >> t[0] >> t[1] >> t[2])) fail(line, "expected 'i j k'");
        mesh.triangles.push_back(t);
    }
    const int nb = read_count("bedges");
    for (int i = 0; i < nb; ++i) {
        auto ls = next_line();
        BoundaryEdge be;
        if (!(ls >> be.a >> be.b >> be.tag)) fail(line, "expected 'i j tag'");
        mesh.boundary_edges.push_back(be);
    }
    validate_mesh(mesh);
    return mesh;
}

/// Uniform-grid point locator. locate() returns the containing triangle and
/// barycentric coordinates, or -1 when the point is outside the mesh.
class PointLocator {
public:
    explicit PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
        lo_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
        hi_ = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
        for (const auto& p : mesh.nodes) {
            lo_.x = std::min(lo_.x, p.x);
            lo_.y = std::min(lo_.y, p.y);
            hi_.x = std::max(hi_.x, p.x);
            hi_.y = std::max(hi_.y, p.y);
        }
        nbin_ = std::max(1, static_cast<int>(std::sqrt(
                                 static_cast<double>(mesh.n_triangles()) / 2.0)));
        bins_.resize(static_cast<std::size_t>(nbin_) * static_cast<std::size_t>(nbin_));
        for (int t = 0; t < mesh.n_triangles(); ++t) {
            Vec2 tlo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
            Vec2 thi = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
            for (int v : mesh.triangles[static_cast<std::size_t>(t)]) {
                const Vec2 p = mesh.nodes[static_cast<std::size_t>(v)];
                tlo.x = std::min(tlo.x, p.x);
                tlo.y = std::min(tlo.y, p.y);
                thi.x = std::max(thi.x, p.x);
                thi.y = std::max(thi.y, p.y);
            }
            for (int bj = bin_index(tlo.y, lo_.y, hi_.y); bj <= bin_index(thi.y, lo_.y, hi_.y); ++bj) {
                for (int bi = bin_index(tlo.x, lo_.x, hi_.x); bi <= bin_index(thi.x, lo_.x, hi_.x); ++bi) {
                    bins_[static_cast<std::size_t>(bj * nbin_ + bi)].push_back(t);
                }
            }
        }
    }

    struct Hit {
        int triangle = -1;
        std::array<double, 3> bary{};
    };

    Hit locate(Vec2 p, double tol = 1e-10) const {
        const int bi = bin_index(p.x, lo_.x, hi_.x);
        const int bj = bin_index(p.y, lo_.y, hi_.y);
        Hit best;
        double best_min_bary = -std::numeric_limits<double>::max();
        for (int t : bins_[static_cast<std::size_t>(bj * nbin_ + bi)]) {
            const auto& tri = mesh_->triangles[static_cast<std::size_t>(t)];
            const Vec2 p0 = mesh_->nodes[static_cast<std::size_t>(tri[0])];
            const Vec2 p1 = mesh_->nodes[static_cast<std::size_t>(tri[1])];
            const Vec2 p2 = mesh_->nodes[static_cast<std::size_t>(tri[2])];
            const double area = signed_area(p0, p1, p2);
            const std::array<double, 3> bary = {signed_area(p, p1, p2) / area,
                                                signed_area(p0, p, p2) / area,
                                                signed_area(p0, p1, p) / area};
            const double min_bary = std::min({bary[0], bary[1], bary[2]});
            if (min_bary > best_min_bary) {
                best_min_bary = min_bary;
                best = {t, bary};
            }
        }
        if (best_min_bary < -tol) best.triangle = -1;
        return best;
    }

private:
    int bin_index(double v, double lo, double hi) const {
        if (hi <= lo) return 0;
        int i = static_cast<int>((v - lo) / (hi - lo) * nbin_);
        return std::clamp(i, 0, nbin_ - 1);
    }

    const TriMesh* mesh_;
    Vec2 lo_, hi_;
    int nbin_ = 1;
    std::vector<std::vector<int>> bins_;
};

}  // namespace cosserat

#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosserat/mesh.hpp"

namespace cosserat {

struct MshParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

class MshReader {
public:
    explicit MshReader(std::istream& is) : is_(is) {}

    TriMesh read() {
        expect_line("$MeshFormat");
        {
            auto ls = next_line();
            std::string version;
            int file_type = -1, data_size = -1;
            if (!(ls >> version >> file_type >> data_size)) {
                fail("malformed $MeshFormat line");
            }
            if (version != "2.2") fail("unsupported MSH version '" + version + "'");
            if (file_type != 0) fail("only ASCII MSH files are supported");
        }
        expect_line("$EndMeshFormat");

        // Skip optional sections ($PhysicalNames etc.) until $Nodes.
        std::string section = next_token_line();
        while (section != "$Nodes") {
            if (section.empty() || section[0] != '$') fail("expected a section, got '" + section + "'");
            const std::string end = "$End" + section.substr(1);
            while (next_token_line() != end) {}
            section = next_token_line();
        }
        read_nodes();
        expect_line("$EndNodes");
        expect_line("$Elements");
        read_elements();
        expect_line("$EndElements");

        validate_mesh(mesh_);
        return mesh_;
    }

private:
    void read_nodes() {
        auto header = next_line();
        int count = -1;
        if (!(header >> count) || count < 0) fail("expected node count");
        for (int k = 0; k < count; ++k) {
            auto ls = next_line();
            long id = 0;
            double x = 0, y = 0, z = 0;
            if (!(ls >> id >> x >> y >> z)) fail("expected 'id x y z'");
            if (std::abs(z) > 1e-12) fail("node " + std::to_string(id) + " has nonzero z-coordinate");
            if (!node_index_.emplace(id, mesh_.n_nodes()).second) {
                fail("duplicate node id " + std::to_string(id));
            }
            mesh_.nodes.push_back({x, y});
        }
    }

    void read_elements() {
        auto header = next_line();
        int count = -1;
        if (!(header >> count) || count < 0) fail("expected element count");
        for (int k = 0; k < count; ++k) {
            auto ls = next_line();
            long id = 0;
            int type = -1, ntags = -1;
            if (!(ls >> id >> type >> ntags) || ntags < 0) fail("expected 'id type ntags ...'");
            std::vector<int> tags(static_cast<std::size_t>(ntags));
            for (int& t : tags) {
                if (!(ls >> t)) fail("truncated tag list");
            }
            if (type == 1) {
                const int a = read_node_ref(ls), b = read_node_ref(ls);
                const int tag = tags.empty() ? 0 : tags[0];
                mesh_.boundary_edges.push_back({a, b, tag});
            } else if (type == 2) {
                const int a = read_node_ref(ls), b = read_node_ref(ls), c = read_node_ref(ls);
                mesh_.triangles.push_back({a, b, c});
            } else {
                fail("unsupported element type " + std::to_string(type));
            }
        }
    }

    int read_node_ref(std::istringstream& ls) {
        long id = 0;
        if (!(ls >> id)) fail("truncated node list");
        auto it = node_index_.find(id);
        if (it == node_index_.end()) fail("reference to unknown node " + std::to_string(id));
        return it->second;
    }

    std::istringstream next_line() {
        std::string buf;
        if (!std::getline(is_, buf)) fail("unexpected end of file");
        ++line_;
        if (!buf.empty() && buf.back() == '\r') buf.pop_back();
        return std::istringstream(buf);
    }

    std::string next_token_line() {
        auto ls = next_line();
        std::string tok;
        ls >> tok;
        return tok;
    }

    void expect_line(const std::string& expected) {
        const std::string tok = next_token_line();
        if (tok != expected) fail("expected '" + expected + "', got '" + tok + "'");
    }

    [[noreturn]] void fail(const std::string& what) {
        throw MshParseError("MSH parse error at line " + std::to_string(line_) + ": " + what);
    }

    std::istream& is_;
    int line_ = 0;
    TriMesh mesh_;
    std::map<long, int> node_index_;
};

}  // namespace detail

/// Reads the ASCII Gmsh legacy v2.2 subset: $Nodes plus $Elements with types
/// 1 (tagged boundary line) and 2 (triangle). The physical tag of each line
/// element becomes the boundary segment tag; 1-based node ids are converted
/// to 0-based indices. The parsed mesh is re-validated.
inline TriMesh parse_msh(std::istream& is) {
    return detail::MshReader(is).read();
}

inline void write_msh(std::ostream& os, const TriMesh& mesh) {
    os.precision(17);
    os << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    os << "$Nodes\n" << mesh.n_nodes() << "\n";
    for (int i = 0; i < mesh.n_nodes(); ++i) {
        const Vec2 p = mesh.nodes[static_cast<std::size_t>(i)];
        os << (i + 1) << " " << p.x << " " << p.y << " 0\n";
    }
    os << "$EndNodes\n";
    os << "$Elements\n" << (mesh.boundary_edges.size() + mesh.triangles.size()) << "\n";
    long id = 1;
    for (const auto& be : mesh.boundary_edges) {
        os << id++ << " 1 2 " << be.tag << " " << be.tag << " " << (be.a + 1) << " "
           << (be.b + 1) << "\n";
    }
    for (const auto& t : mesh.triangles) {
        os << id++ << " 2 2 0 1 " << (t[0] + 1) << " " << (t[1] + 1) << " " << (t[2] + 1)
           << "\n";
    }
    os << "$EndElements\n";
}

}  // namespace cosserat

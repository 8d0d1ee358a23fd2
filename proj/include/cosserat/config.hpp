#pragma once

#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosserat/assembly.hpp"
#include "cosserat/material.hpp"
#include "cosserat/mesh.hpp"
#include "cosserat/msh_io.hpp"
#include "cosserat/operator_table.hpp"
#include "cosserat/solver.hpp"

namespace cosserat {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key-value configuration text: one `section.key = value` per line,
/// `#` starts a comment, blank lines ignored.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& is) {
        KeyValueConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto strip = [](std::string s) {
                const auto begin = s.find_first_not_of(" \t\r");
                if (begin == std::string::npos) return std::string();
                const auto end = s.find_last_not_of(" \t\r");
                return s.substr(begin, end - begin + 1);
            };
            if (strip(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
            }
            const std::string key = strip(line.substr(0, eq));
            const std::string value = strip(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            }
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
        return it->second;
    }

    std::string get_string_or(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key) const { return to_double(key, get_string(key)); }

    double get_double_or(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    int get_int(const std::string& key) const {
        const double v = get_double(key);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v) {
            throw ConfigError("key '" + key + "' must be an integer");
        }
        return i;
    }

    int get_int_or(const std::string& key, int fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    std::vector<double> get_double_list(const std::string& key) const {
        const std::string raw = get_string(key);
        std::vector<double> out;
        std::string token;
        std::istringstream is(raw);
        while (std::getline(is, token, ',')) out.push_back(to_double(key, token));
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    static double to_double(const std::string& key, const std::string& raw) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(raw, &pos);
            while (pos < raw.size() && (raw[pos] == ' ' || raw[pos] == '\t')) ++pos;
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as a number");
        }
    }

    std::map<std::string, std::string> values_;
};

/// Fully resolved run configuration for the command-line front end.
struct RunConfig {
    MaterialParams material{};
    double k1 = 1.0;

    enum class Geometry { rectangle, msh, hole };
    Geometry geometry = Geometry::rectangle;
    double a = 1.0, b = 1.0;
    int nx = 8, ny = 8;
    std::string msh_path;
    double hole_radius = 0.2;
    Vec2 hole_center{0.5, 0.5};
    double density = 0.1;

    enum class Bc { clamped, simply_supported };
    Bc bc = Bc::clamped;
    bool hole_rim_clamped = false;  // SCF holes are free (natural) by default

    enum class Load { sinusoidal, uniform };
    Load load = Load::sinusoidal;
    double amplitude = 1.0;

    bool eta_auto = true;
    double eta_fixed = 1.0;
    int refinements = 0;

    std::string out_fields_csv;
    std::string out_resultants_csv;
    std::string out_vtk;

    double solver_tol = 1e-10;
    SolveMethod solver_method = SolveMethod::direct;

    std::array<double, 9> mms_amplitudes = {1, 1, 1, 1, 1, 1, 1, 1, 1};
    std::vector<double> scf_radii;
    double scf_density = 0.05;

    static RunConfig from_kv(const KeyValueConfig& kv) {
        RunConfig rc;
        rc.material.lambda = kv.get_double("material.lambda");
        rc.material.mu = kv.get_double("material.mu");
        rc.material.alpha = kv.get_double("material.alpha");
        rc.material.beta = kv.get_double("material.beta");
        rc.material.gamma = kv.get_double("material.gamma");
        rc.material.epsilon = kv.get_double("material.epsilon");
        rc.material.thickness = kv.get_double("material.thickness");
        rc.k1 = kv.get_double_or("material.k1", 1.0);
        try {
            rc.material.validate();
        } catch (const std::domain_error& e) {
            throw ConfigError(e.what());
        }

        const std::string geom = kv.get_string_or("geometry.kind", "rectangle");
        if (geom == "rectangle") {
            rc.geometry = Geometry::rectangle;
        } else if (geom == "msh") {
            rc.geometry = Geometry::msh;
        } else if (geom == "hole") {
            rc.geometry = Geometry::hole;
        } else {
            throw ConfigError("geometry.kind must be rectangle, msh or hole");
        }
        rc.a = kv.get_double_or("geometry.a", 1.0);
        rc.b = kv.get_double_or("geometry.b", rc.a);
        rc.nx = kv.get_int_or("geometry.nx", 8);
        rc.ny = kv.get_int_or("geometry.ny", rc.nx);
        if (rc.geometry == Geometry::msh) rc.msh_path = kv.get_string("geometry.msh");
        if (rc.geometry == Geometry::hole) {
            rc.hole_radius = kv.get_double("geometry.hole_radius");
            rc.hole_center = {kv.get_double_or("geometry.hole_cx", rc.a / 2.0),
                              kv.get_double_or("geometry.hole_cy", rc.b / 2.0)};
            rc.density = kv.get_double_or("geometry.density", 0.1);
        }

        const std::string bc = kv.get_string_or("bc.kind", "clamped");
        if (bc == "clamped") {
            rc.bc = Bc::clamped;
        } else if (bc == "simply_supported") {
            rc.bc = Bc::simply_supported;
        } else {
            throw ConfigError("bc.kind must be clamped or simply_supported");
        }
        const std::string hole_bc = kv.get_string_or("bc.hole", "free");
        if (hole_bc == "free") {
            rc.hole_rim_clamped = false;
        } else if (hole_bc == "clamped") {
            rc.hole_rim_clamped = true;
        } else {
            throw ConfigError("bc.hole must be free or clamped");
        }

        const std::string load = kv.get_string_or("load.kind", "sinusoidal");
        if (load == "sinusoidal") {
            rc.load = Load::sinusoidal;
        } else if (load == "uniform") {
            rc.load = Load::uniform;
        } else {
            throw ConfigError("load.kind must be sinusoidal or uniform");
        }
        rc.amplitude = kv.get_double_or("load.amplitude", 1.0);

        const std::string eta = kv.get_string_or("eta", "auto");
        if (eta == "auto") {
            rc.eta_auto = true;
        } else {
            rc.eta_auto = false;
            std::istringstream es(eta);
            if (!(es >> rc.eta_fixed)) throw ConfigError("eta must be 'auto' or a number");
        }
        rc.refinements = kv.get_int_or("refinements", 0);
        if (rc.refinements < 0) throw ConfigError("refinements must be >= 0");

        rc.out_fields_csv = kv.get_string_or("output.fields_csv", "");
        rc.out_resultants_csv = kv.get_string_or("output.resultants_csv", "");
        rc.out_vtk = kv.get_string_or("output.vtk", "");

        rc.solver_tol = kv.get_double_or("solver.tol", 1e-10);
        const std::string method = kv.get_string_or("solver.method", "direct");
        if (method == "direct") {
            rc.solver_method = SolveMethod::direct;
        } else if (method == "iterative") {
            rc.solver_method = SolveMethod::iterative;
        } else {
            throw ConfigError("solver.method must be direct or iterative");
        }

        if (kv.has("mms.amplitudes")) {
            const auto list = kv.get_double_list("mms.amplitudes");
            if (list.size() != 9) throw ConfigError("mms.amplitudes must list 9 values");
            for (std::size_t i = 0; i < 9; ++i) rc.mms_amplitudes[i] = list[i];
        }
        if (kv.has("scf.radii")) rc.scf_radii = kv.get_double_list("scf.radii");
        rc.scf_density = kv.get_double_or("scf.density", 0.05);
        return rc;
    }

    static RunConfig load_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot open config file '" + path + "'");
        const KeyValueConfig kv = KeyValueConfig::parse(is);
        return from_kv(kv);
    }

    LoadSpec make_load() const {
        if (load == Load::uniform) return LoadSpec::uniform(amplitude);
        return LoadSpec::sinusoidal(amplitude, a);
    }

    TriMesh make_initial_mesh() const {
        switch (geometry) {
            case Geometry::rectangle:
                return generate_rectangle(a, b, nx, ny);
            case Geometry::hole:
                return generate_plate_with_hole(a, b, hole_radius, hole_center, density);
            case Geometry::msh: {
                std::ifstream is(msh_path);
                if (!is) throw ConfigError("cannot open mesh file '" + msh_path + "'");
                return parse_msh(is);
            }
        }
        throw ConfigError("unreachable geometry kind");
    }

    TriMesh make_mesh() const {
        TriMesh mesh = make_initial_mesh();
        for (int k = 0; k < refinements; ++k) mesh = refine_uniform(mesh);
        return mesh;
    }

    BcSpec make_bc() const {
        BcSpec spec = bc == Bc::clamped ? BcSpec::clamped() : BcSpec::simply_supported();
        if (!hole_rim_clamped) spec.set_all(kTagHole, BcType::natural);
        return spec;
    }

    StiffnessCoefficients make_coefficients() const { return derive_coefficients(material, k1); }

    /// Effective configuration, reparseable by from_kv.
    void dump(std::ostream& os) const {
        os.precision(17);
        os << "material.lambda = " << material.lambda << "\n";
        os << "material.mu = " << material.mu << "\n";
        os << "material.alpha = " << material.alpha << "\n";
        os << "material.beta = " << material.beta << "\n";
        os << "material.gamma = " << material.gamma << "\n";
        os << "material.epsilon = " << material.epsilon << "\n";
        os << "material.thickness = " << material.thickness << "\n";
        os << "material.k1 = " << k1 << "\n";
        os << "geometry.kind = "
           << (geometry == Geometry::rectangle ? "rectangle"
                                               : geometry == Geometry::msh ? "msh" : "hole")
           << "\n";
        os << "geometry.a = " << a << "\n";
        os << "geometry.b = " << b << "\n";
        os << "geometry.nx = " << nx << "\n";
        os << "geometry.ny = " << ny << "\n";
        if (!msh_path.empty()) os << "geometry.msh = " << msh_path << "\n";
        if (geometry == Geometry::hole) {
            os << "geometry.hole_radius = " << hole_radius << "\n";
            os << "geometry.hole_cx = " << hole_center.x << "\n";
            os << "geometry.hole_cy = " << hole_center.y << "\n";
            os << "geometry.density = " << density << "\n";
        }
        os << "bc.kind = " << (bc == Bc::clamped ? "clamped" : "simply_supported") << "\n";
        os << "bc.hole = " << (hole_rim_clamped ? "clamped" : "free") << "\n";
        os << "load.kind = " << (load == Load::sinusoidal ? "sinusoidal" : "uniform") << "\n";
        os << "load.amplitude = " << amplitude << "\n";
        if (eta_auto) {
            os << "eta = auto\n";
        } else {
            os << "eta = " << eta_fixed << "\n";
        }
        os << "refinements = " << refinements << "\n";
        if (!out_fields_csv.empty()) os << "output.fields_csv = " << out_fields_csv << "\n";
        if (!out_resultants_csv.empty()) {
            os << "output.resultants_csv = " << out_resultants_csv << "\n";
        }
        if (!out_vtk.empty()) os << "output.vtk = " << out_vtk << "\n";
        os << "solver.tol = " << solver_tol << "\n";
        os << "solver.method = "
           << (solver_method == SolveMethod::direct ? "direct" : "iterative") << "\n";
        os << "mms.amplitudes = ";
        for (std::size_t i = 0; i < 9; ++i) os << (i ? "," : "") << mms_amplitudes[i];
        os << "\n";
        if (!scf_radii.empty()) {
            os << "scf.radii = ";
            for (std::size_t i = 0; i < scf_radii.size(); ++i) {
                os << (i ? "," : "") << scf_radii[i];
            }
            os << "\n";
            os << "scf.density = " << scf_density << "\n";
        }
    }
};

}  // namespace cosserat

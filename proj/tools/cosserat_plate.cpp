// Command-line front end: solve, mms, scf and mesh subcommands.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cosserat/cosserat.hpp"

namespace fs = std::filesystem;
using namespace cosserat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitSolverError = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::string solver_override;
    double tol_override = -1.0;
};

RunConfig load_config(const CommonOpts& opts) {
    RunConfig rc = RunConfig::load_file(opts.config_path);
    if (opts.solver_override == "direct") rc.solver_method = SolveMethod::direct;
    if (opts.solver_override == "iterative") rc.solver_method = SolveMethod::iterative;
    if (opts.tol_override > 0.0) rc.solver_tol = opts.tol_override;
    return rc;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file '" + path.string() + "'");
    return os;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

TriMesh read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open mesh file '" + path + "'");
    if (fs::path(path).extension() == ".msh") return parse_msh(is);
    return read_tri_mesh(is);
}

void write_mesh_file(const std::string& path, const TriMesh& mesh) {
    auto os = open_output(path);
    if (fs::path(path).extension() == ".msh") {
        write_msh(os, mesh);
    } else {
        write_tri_mesh(os, mesh);
    }
}

FieldSolution solve_fixed_eta(const TriMesh& mesh, const OperatorTable& table,
                              const LoadSpec& load, const BcSpec& bc, const MaterialParams& m,
                              double eta, double tol, SolveMethod method,
                              SolveReport* report = nullptr) {
    const RhsVector f(load, m, eta);
    auto [x, rep] = solve(assemble(mesh, table, rhs_components(f), bc), tol, method);
    if (report) *report = rep;
    return FieldSolution::from_vector(x, mesh.n_nodes(), eta);
}

int run_solve(const CommonOpts& opts, bool verify_linearity) {
    const RunConfig rc = load_config(opts);
    const TriMesh mesh = rc.make_mesh();
    const OperatorTable table = build_operator_table(rc.make_coefficients());
    const LoadSpec load = rc.make_load();
    const BcSpec bc = rc.make_bc();

    fs::create_directories(opts.out_dir);
    std::ostringstream report;
    report.precision(12);

    FieldSolution sol;
    if (rc.eta_auto) {
        SplitReport split;
        sol = solve_with_splitting(mesh, table, load, bc, rc.material, rc.solver_tol,
                                   rc.solver_method, &split);
        report << split.to_text();
    } else {
        SolveReport rep;
        sol = solve_fixed_eta(mesh, table, load, bc, rc.material, rc.eta_fixed, rc.solver_tol,
                              rc.solver_method, &rep);
        report << "eta = " << rc.eta_fixed << " (fixed)\n";
        report << "residual: " << rep.relative_residual << " (" << rep.method << ")\n";
    }
    report << "nodes = " << mesh.n_nodes() << ", triangles = " << mesh.n_triangles() << "\n";
    report << "max |W| = " << max_abs(sol.field(kW)) << "\n";

    if (verify_linearity) {
        const FieldSolution direct = solve_fixed_eta(mesh, table, load, bc, rc.material,
                                                     sol.eta, rc.solver_tol, rc.solver_method);
        double num = 0.0, den = 0.0;
        for (int var = 0; var < kNumVars; ++var) {
            for (int k = 0; k < mesh.n_nodes(); ++k) {
                const double d = direct.fields[static_cast<std::size_t>(var)][static_cast<std::size_t>(k)] -
                                 sol.fields[static_cast<std::size_t>(var)][static_cast<std::size_t>(k)];
                num += d * d;
                den += direct.fields[static_cast<std::size_t>(var)][static_cast<std::size_t>(k)] *
                       direct.fields[static_cast<std::size_t>(var)][static_cast<std::size_t>(k)];
            }
        }
        const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
        report << "linearity check: direct solve at eta vs combination, relative L2 diff = "
               << rel << "\n";
        if (!(rel <= 1e-8)) {
            std::cerr << report.str();
            std::cerr << "linearity verification failed\n";
            return kExitSolverError;
        }
    }

    const ResultantField res = resultants(sol, mesh, rc.material, load);
    {
        const fs::path path = fs::path(opts.out_dir) /
                              (rc.out_fields_csv.empty() ? "fields.csv" : rc.out_fields_csv);
        auto os = open_output(path);
        write_fields_csv(os, sol, mesh);
    }
    {
        const fs::path path =
            fs::path(opts.out_dir) /
            (rc.out_resultants_csv.empty() ? "resultants.csv" : rc.out_resultants_csv);
        auto os = open_output(path);
        write_resultants_csv(os, res, mesh);
    }
    if (!rc.out_vtk.empty()) {
        auto os = open_output(fs::path(opts.out_dir) / rc.out_vtk);
        write_vtk(os, sol, mesh, &res);
    }
    {
        auto os = open_output(fs::path(opts.out_dir) / "run_report.txt");
        os << report.str();
    }
    {
        auto os = open_output(fs::path(opts.out_dir) / "effective_config.txt");
        rc.dump(os);
    }
    std::cout << report.str();
    return kExitOk;
}

int run_mms(const CommonOpts& opts) {
    const RunConfig rc = load_config(opts);
    if (rc.geometry != RunConfig::Geometry::rectangle) {
        throw ConfigError("mms requires rectangle geometry");
    }
    if (rc.a != rc.b) throw ConfigError("mms requires a square plate (geometry.a == geometry.b)");
    if (rc.refinements < 1) throw ConfigError("mms requires refinements >= 1");

    const TriMesh initial = rc.make_initial_mesh();
    const OperatorTable table = build_operator_table(rc.make_coefficients());
    const bool dirichlet = rc.bc == RunConfig::Bc::clamped;
    const NineFields exact = dirichlet ? mms_dirichlet_fields(rc.a, rc.mms_amplitudes)
                                       : mms_mixed_fields(rc.a, rc.mms_amplitudes);
    const BcSpec bc = dirichlet ? BcSpec::clamped() : BcSpec::simply_supported();

    const ErrorReport report = convergence_study_mms(initial, rc.refinements, table, exact, bc,
                                                     rc.solver_tol, rc.solver_method);

    fs::create_directories(opts.out_dir);
    {
        auto os = open_output(fs::path(opts.out_dir) / "mms_h1.csv");
        write_rate_table(os, report, true);
    }
    {
        auto os = open_output(fs::path(opts.out_dir) / "mms_l2.csv");
        write_rate_table(os, report, false);
    }
    write_rate_table(std::cout, report, true);
    write_rate_table(std::cout, report, false);
    return kExitOk;
}

int run_scf(const CommonOpts& opts) {
    const RunConfig rc = load_config(opts);
    if (rc.scf_radii.size() < 2) throw ConfigError("scf: need >= 2 radii (scf.radii)");

    const OperatorTable table = build_operator_table(rc.make_coefficients());
    const LoadSpec load = rc.make_load();
    const Vec2 center = {rc.a / 2.0, rc.b / 2.0};

    // Hole-free nominal at the hole-center location, same outer geometry.
    const int nominal_nx = std::max(8, static_cast<int>(std::ceil(rc.a / rc.scf_density)));
    const int nominal_ny = std::max(8, static_cast<int>(std::ceil(rc.b / rc.scf_density)));
    const TriMesh plain = generate_rectangle(rc.a, rc.b, nominal_nx, nominal_ny);
    const BcSpec outer_bc =
        rc.bc == RunConfig::Bc::clamped ? BcSpec::clamped() : BcSpec::simply_supported();
    const FieldSolution plain_sol = rc.eta_auto
        ? solve_with_splitting(plain, table, load, outer_bc, rc.material, rc.solver_tol,
                               rc.solver_method)
        : solve_fixed_eta(plain, table, load, outer_bc, rc.material, rc.eta_fixed,
                          rc.solver_tol, rc.solver_method);
    const double nominal = bending_stress_at(plain_sol, plain, rc.material, load, center);

    fs::create_directories(opts.out_dir);
    auto os = open_output(fs::path(opts.out_dir) / "scf.csv");
    os.precision(12);
    os << "radius,scf\n";

    std::vector<double> radii = rc.scf_radii;
    std::sort(radii.begin(), radii.end());
    std::vector<double> factors;
    for (double r : radii) {
        const TriMesh mesh = generate_plate_with_hole(rc.a, rc.b, r, center, rc.scf_density);
        const BcSpec bc = rc.make_bc();
        const FieldSolution sol = rc.eta_auto
            ? solve_with_splitting(mesh, table, load, bc, rc.material, rc.solver_tol,
                                   rc.solver_method)
            : solve_fixed_eta(mesh, table, load, bc, rc.material, rc.eta_fixed, rc.solver_tol,
                              rc.solver_method);
        const double scf = stress_concentration(sol, mesh, rc.material, load, nominal);
        factors.push_back(scf);
        os << r << "," << scf << "\n";
        std::cout << "radius " << r << ": SCF = " << scf << "\n";
    }
    const bool monotone = std::is_sorted(factors.begin(), factors.end());
    os << "# monotone nondecreasing in radius: " << (monotone ? "yes" : "no") << "\n";
    std::cout << "SCF nondecreasing in radius: " << (monotone ? "yes" : "no") << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite element solver for bending of Cosserat elastic plates"};
    app.require_subcommand(1);

    CommonOpts opts;
    bool verify_linearity = false;

    auto add_common = [&opts](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "run configuration file")->required();
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--solver", opts.solver_override, "direct|iterative")
            ->check(CLI::IsMember({"direct", "iterative"}));
        cmd->add_option("--tol", opts.tol_override, "solver relative-residual tolerance");
    };

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve one plate problem");
    add_common(solve_cmd);
    solve_cmd->add_flag("--verify-linearity", verify_linearity,
                        "redundantly solve at the combined eta and compare");

    CLI::App* mms_cmd = app.add_subcommand("mms", "manufactured-solution convergence study");
    add_common(mms_cmd);

    CLI::App* scf_cmd = app.add_subcommand("scf", "stress-concentration study over hole radii");
    add_common(scf_cmd);

    CLI::App* mesh_cmd = app.add_subcommand("mesh", "mesh utilities");
    mesh_cmd->require_subcommand(1);

    struct MeshOpts {
        std::string kind = "rect";
        double a = 1.0, b = 1.0;
        int nx = 8, ny = 8;
        double radius = 0.2, cx = 0.5, cy = 0.5, density = 0.1;
        int times = 1;
        std::string in_path, out_path;
    } mopts;

    CLI::App* gen_cmd = mesh_cmd->add_subcommand("generate", "generate a mesh");
    gen_cmd->add_option("--kind", mopts.kind, "rect|hole")->check(CLI::IsMember({"rect", "hole"}));
    gen_cmd->add_option("--a", mopts.a, "width");
    gen_cmd->add_option("--b", mopts.b, "height");
    gen_cmd->add_option("--nx", mopts.nx, "x subdivisions (rect)");
    gen_cmd->add_option("--ny", mopts.ny, "y subdivisions (rect)");
    gen_cmd->add_option("--radius", mopts.radius, "hole radius");
    gen_cmd->add_option("--cx", mopts.cx, "hole center x");
    gen_cmd->add_option("--cy", mopts.cy, "hole center y");
    gen_cmd->add_option("--density", mopts.density, "target edge length (hole)");
    gen_cmd->add_option("out", mopts.out_path, "output file (.msh or native)")->required();

    CLI::App* refine_cmd = mesh_cmd->add_subcommand("refine", "uniform red refinement");
    refine_cmd->add_option("--times", mopts.times, "number of refinements");
    refine_cmd->add_option("in", mopts.in_path, "input mesh")->required();
    refine_cmd->add_option("out", mopts.out_path, "output mesh")->required();

    CLI::App* info_cmd = mesh_cmd->add_subcommand("info", "print mesh metrics");
    info_cmd->add_option("in", mopts.in_path, "input mesh")->required();

    CLI::App* convert_cmd = mesh_cmd->add_subcommand("convert", "convert between formats");
    convert_cmd->add_option("in", mopts.in_path, "input mesh")->required();
    convert_cmd->add_option("out", mopts.out_path, "output mesh")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) return run_solve(opts, verify_linearity);
        if (mms_cmd->parsed()) return run_mms(opts);
        if (scf_cmd->parsed()) return run_scf(opts);
        if (mesh_cmd->parsed()) {
            if (gen_cmd->parsed()) {
                const TriMesh mesh =
                    mopts.kind == "rect"
                        ? generate_rectangle(mopts.a, mopts.b, mopts.nx, mopts.ny)
                        : generate_plate_with_hole(mopts.a, mopts.b, mopts.radius,
                                                   {mopts.cx, mopts.cy}, mopts.density);
                write_mesh_file(mopts.out_path, mesh);
                return kExitOk;
            }
            if (refine_cmd->parsed()) {
                TriMesh mesh = read_mesh_file(mopts.in_path);
                for (int k = 0; k < mopts.times; ++k) mesh = refine_uniform(mesh);
                write_mesh_file(mopts.out_path, mesh);
                return kExitOk;
            }
            if (info_cmd->parsed()) {
                const TriMesh mesh = read_mesh_file(mopts.in_path);
                const MeshMetrics mm = metrics(mesh);
                std::cout << "nodes = " << mm.n_nodes << "\n";
                std::cout << "triangles = " << mm.n_triangles << "\n";
                std::cout << "h_max = " << mm.h_max << "\n";
                std::cout << "area = " << total_area(mesh) << "\n";
                std::cout << "boundary edges = " << mesh.boundary_edges.size() << "\n";
                for (const auto& [tag, nodes] : boundary_nodes_by_tag(mesh)) {
                    std::cout << "tag " << tag << ": " << nodes.size() << " nodes\n";
                }
                return kExitOk;
            }
            if (convert_cmd->parsed()) {
                write_mesh_file(mopts.out_path, read_mesh_file(mopts.in_path));
                return kExitOk;
            }
        }
    } catch (const SolveError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolverError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}

#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <stdexcept>
#include <string>
#include <utility>

#include "cosserat/assembly.hpp"

namespace cosserat {

enum class SolveMethod { direct, iterative };

struct SolveReport {
    double relative_residual = 0.0;
    int iterations = 0;  // 0 for the direct path
    std::string method;
};

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Factorization breakdown or stagnation; typically signals a singular
/// system (e.g. a pure-Neumann variable block).
struct SingularSystem : SolveError {
    using SolveError::SolveError;
};

struct NonConvergence : SolveError {
    NonConvergence(const std::string& what, double achieved)
        : SolveError(what), achieved_residual(achieved) {}
    double achieved_residual;
};

/// Solves the assembled system to the given relative-residual tolerance.
/// The system is nonsymmetric and carries no definiteness-sign guarantee,
/// so the primary path is a sparse LU factorization; the iterative path is
/// BiCGSTAB with incomplete-LU preconditioning. Deterministic for fixed
/// inputs. The reported residual is re-verified with an independent
/// matrix-vector multiply.
inline std::pair<Eigen::VectorXd, SolveReport> solve(const BlockSystem& sys, double tol = 1e-10,
                                                     SolveMethod method = SolveMethod::direct) {
    if (!(tol > 0.0) || tol > 1e-2) {
        throw std::invalid_argument("solve: tol must be in (0, 1e-2]");
    }
    if (sys.matrix.rows() != sys.matrix.cols() || sys.matrix.rows() != sys.rhs.size()) {
        throw std::invalid_argument("solve: system is not square/consistent");
    }

    Eigen::VectorXd x;
    SolveReport report;

    if (method == SolveMethod::direct) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(sys.matrix);
        lu.factorize(sys.matrix);
        if (lu.info() != Eigen::Success) {
            throw SingularSystem("solve: sparse LU factorization failed (singular system?)");
        }
        x = lu.solve(sys.rhs);
        report.method = "sparse-lu";
    } else {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
        krylov.setTolerance(tol * 1e-2);  // headroom: Eigen's criterion is not the final check
        krylov.setMaxIterations(2000);
        krylov.compute(sys.matrix);
        if (krylov.info() != Eigen::Success) {
            throw SingularSystem("solve: incomplete-LU preconditioner construction failed");
        }
        x = krylov.solve(sys.rhs);
        report.iterations = static_cast<int>(krylov.iterations());
        report.method = "bicgstab-ilut";
    }

    const double rhs_norm = sys.rhs.norm();
    const double residual = (sys.matrix * x - sys.rhs).norm();
    report.relative_residual = rhs_norm > 0.0 ? residual / rhs_norm : residual;
    if (!(report.relative_residual <= tol)) {
        throw NonConvergence("solve: relative residual " +
                                 std::to_string(report.relative_residual) +
                                 " exceeds tolerance " + std::to_string(tol),
                             report.relative_residual);
    }
    return {std::move(x), report};
}

}  // namespace cosserat

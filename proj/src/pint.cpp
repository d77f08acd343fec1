#include "isp/pint.hpp"

#include "isp/errors.hpp"
#include "parallel.hpp"

#include <chrono>
#include <sstream>

namespace isp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Row-block height for steps (a) and (c). Fixed so that each output entry is
// produced by the same kernel call whatever the thread count.
constexpr Eigen::Index row_block = 128;

int block_count(Eigen::Index rows) {
    return static_cast<int>((rows + row_block - 1) / row_block);
}

}  // namespace

void InverseProblem::validate() const {
    const Eigen::Index dof = grid.dof();
    if (phi.size() != dof) throw InvalidArgument("InverseProblem: phi has wrong length");
    if (g_delta.size() != dof) throw InvalidArgument("InverseProblem: g_delta has wrong length");
    if (!q.empty() && static_cast<int>(q.size()) != timegrid.n()) {
        throw InvalidArgument("InverseProblem: q must have length n");
    }
    if (!(spec.beta > 0.0)) throw InvalidArgument("InverseProblem: beta must be positive");
}

std::vector<double> InverseProblem::q_samples() const {
    if (q.empty()) return std::vector<double>(static_cast<std::size_t>(timegrid.n()), 1.0);
    return q;
}

Matrix assemble_rhs(const InverseProblem& problem) {
    problem.validate();
    Matrix Z = Matrix::Zero(problem.grid.dof(), problem.timegrid.n() + 1);
    Z.col(0) = problem.g_delta / problem.spec.beta;
    Z.col(1) = problem.phi / problem.timegrid.tau();
    return Z;
}

Matrix apply_kronecker(const TimeMatrix& tm, const DirichletLaplacian& lap, const Matrix& U) {
    const int n = tm.timegrid().n();
    const double inv_tau = 1.0 / tm.timegrid().tau();
    if (U.cols() != n + 1 || U.rows() != lap.grid().dof()) {
        throw InvalidArgument("apply_kronecker: U must be dof x (n+1)");
    }
    Matrix out(U.rows(), U.cols());
    out.col(0) = tm.spec().alpha * U.col(0) + U.col(n) / tm.spec().beta - lap.apply(Vector(U.col(0)));
    for (int j = 1; j <= n; ++j) {
        Vector col = inv_tau * U.col(j) - tm.q()[static_cast<std::size_t>(j - 1)] * U.col(0);
        if (j >= 2) col -= inv_tau * U.col(j - 1);
        out.col(j) = col - lap.apply(Vector(U.col(j)));
    }
    return out;
}

double relative_residual(const TimeMatrix& tm, const DirichletLaplacian& lap, const Matrix& U,
                         const Matrix& Z) {
    const double r = (apply_kronecker(tm, lap, U) - Z).norm();
    const double b = Z.norm();
    return b > 0.0 ? r / b : r;
}

ReconstructionResult solve(const InverseProblem& problem, const Diagonalization& diag,
                           const DirichletLaplacian& lap, const PintOptions& options) {
    problem.validate();
    if (problem.spec.method == Method::qbvm) {
        throw InvalidArgument("pint::solve: QBVM has no Kronecker form; use the all-at-once solver");
    }
    if (!(lap.grid() == problem.grid)) throw InvalidArgument("pint::solve: Laplacian grid mismatch");
    const int n = problem.timegrid.n();
    if (diag.mu.size() != n + 1) throw InvalidArgument("pint::solve: diagonalization size mismatch");

    const Matrix Z = assemble_rhs(problem);
    const Eigen::Index dof = Z.rows();
    const Eigen::Index cols = n + 1;
    const int blocks = block_count(dof);
    ReconstructionResult result;

    // (a) S1 = Z W^T, restricted to the nonzero columns of Z.
    auto start = Clock::now();
    std::vector<Eigen::Index> active;
    for (Eigen::Index k = 0; k < cols; ++k) {
        if (Z.col(k).squaredNorm() > 0.0) active.push_back(k);
    }
    const auto nk = static_cast<Eigen::Index>(active.size());
    CMatrix Za(dof, nk), Wt(nk, cols);
    for (Eigen::Index a = 0; a < nk; ++a) {
        Za.col(a) = Z.col(active[static_cast<std::size_t>(a)]).cast<Complex>();
        Wt.row(a) = diag.W.col(active[static_cast<std::size_t>(a)]).transpose();
    }
    CMatrix S(dof, cols);
    detail::parallel_for(blocks, options.threads, [&](int b) {
        const Eigen::Index r0 = b * row_block;
        const Eigen::Index rows = std::min(row_block, dof - r0);
        if (nk == 0) {
            S.middleRows(r0, rows).setZero();
        } else {
            S.middleRows(r0, rows).noalias() = Za.middleRows(r0, rows) * Wt;
        }
    });
    result.timings.step_a = seconds_since(start);

    // (b) one shifted spatial solve per eigenvalue, in place.
    start = Clock::now();
    detail::parallel_for(static_cast<int>(cols), options.threads, [&](int j) {
        S.col(j) = lap.shifted_solve(diag.lambda[j], CVector(S.col(j)));
    });
    result.timings.step_b = seconds_since(start);

    // (c) U = S2 V^T. A_h and b_h are real, so only Re U is formed; the
    // imaginary part is tracked for the source column as a sanity gate.
    start = Clock::now();
    const Matrix Sr = S.real(), Si = S.imag();
    const Matrix VrT = diag.V.real().transpose(), ViT = diag.V.imag().transpose();
    Matrix U(dof, cols);
    detail::parallel_for(blocks, options.threads, [&](int b) {
        const Eigen::Index r0 = b * row_block;
        const Eigen::Index rows = std::min(row_block, dof - r0);
        auto block = U.middleRows(r0, rows);
        block.noalias() = Sr.middleRows(r0, rows) * VrT;
        block.noalias() -= Si.middleRows(r0, rows) * ViT;
    });
    const Vector f_imag = Sr * ViT.col(0) + Si * VrT.col(0);
    result.timings.step_c = seconds_since(start);

    result.f = U.col(0);
    const double f_norm = result.f.norm();
    const double imag_norm = f_imag.norm();
    result.imag_residue = f_norm > 0.0 ? imag_norm / f_norm : imag_norm;
    if (!(result.imag_residue <= options.imag_tolerance)) {
        std::ostringstream msg;
        msg << "pint::solve: imaginary residue " << result.imag_residue << " exceeds "
            << options.imag_tolerance;
        throw NonRealReconstruction(msg.str());
    }

    const TimeMatrix tm(problem.timegrid, problem.spec, problem.q_samples());
    result.residual = relative_residual(tm, lap, U, Z);
    if (options.keep_trajectory) result.trajectory = U.rightCols(n);
    return result;
}

ReconstructionResult solve(const InverseProblem& problem, const PintOptions& options) {
    problem.validate();
    const auto start = Clock::now();
    const TimeMatrix tm = build_time_matrix(problem.timegrid, problem.spec, problem.q_samples());
    const Diagonalization diag = diagonalize(tm, options.diagonalize);
    const double t_diag = seconds_since(start);
    const DirichletLaplacian lap(problem.grid);
    ReconstructionResult result = solve(problem, diag, lap, options);
    result.timings.diagonalize = t_diag;
    return result;
}

double residual_check(const InverseProblem& problem, const ReconstructionResult& result) {
    if (!result.trajectory) throw InvalidArgument("residual_check: result has no trajectory");
    const TimeMatrix tm(problem.timegrid, problem.spec, problem.q_samples());
    const DirichletLaplacian lap(problem.grid);
    Matrix U(problem.grid.dof(), problem.timegrid.n() + 1);
    U.col(0) = result.f;
    U.rightCols(problem.timegrid.n()) = *result.trajectory;
    return relative_residual(tm, lap, U, assemble_rhs(problem));
}

}  // namespace isp

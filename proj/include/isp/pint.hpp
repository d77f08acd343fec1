#pragma once

#include "isp/grid.hpp"
#include "isp/timedisc.hpp"

#include <optional>
#include <vector>

namespace isp {

/// Data of the regularized inverse source problem: measured final state,
/// initial state, regularization and the time profile q (empty = all ones).
struct InverseProblem {
    SpatialGrid grid;
    TimeGrid timegrid;
    RegularizationSpec spec;
    Vector phi;
    Vector g_delta;
    std::vector<double> q;

    void validate() const;
    /// q_j for j = 1..n with the default of all ones filled in.
    std::vector<double> q_samples() const;
};

struct SolveTimings {
    double diagonalize = 0.0;
    double step_a = 0.0;
    double step_b = 0.0;
    double step_c = 0.0;

    double total() const { return diagonalize + step_a + step_b + step_c; }
};

struct ReconstructionResult {
    /// Reconstructed source f_h.
    Vector f;
    /// Columns u^1..u^n (dof x n) when requested.
    std::optional<Matrix> trajectory;
    /// ||A_h u - b||_2 / ||b||_2.
    double residual = 0.0;
    /// ||Im f|| / ||f|| before the imaginary part was dropped.
    double imag_residue = 0.0;
    SolveTimings timings;
};

struct PintOptions {
    /// Worker threads for steps (a)-(c); results do not depend on this.
    unsigned threads = 1;
    bool keep_trajectory = false;
    /// Imaginary residue above which NonRealReconstruction is thrown.
    double imag_tolerance = 1e-8;
    DiagonalizeOptions diagonalize;
};

/// Z = mat(b_h), dof x (n+1): column 0 = g_delta/beta, column 1 = phi/tau, rest zero.
Matrix assemble_rhs(const InverseProblem& problem);

/// A_h vec(U) = vec(U B^T - Delta_h U) for U of size dof x (n+1), the
/// Kronecker form B (x) I_h - I_t (x) Delta_h applied matrix-free.
Matrix apply_kronecker(const TimeMatrix& tm, const DirichletLaplacian& lap, const Matrix& U);

/// Relative all-at-once residual ||A_h vec(U) - b_h|| / ||b_h|| (0 when b_h = 0 and U = 0).
double relative_residual(const TimeMatrix& tm, const DirichletLaplacian& lap, const Matrix& U,
                         const Matrix& Z);

/// The three-step diagonalization solver:
///   (a) S1 = Z W^T,  (b) S2(:,j) = (lambda_j I - Delta_h)^{-1} S1(:,j),  (c) U = S2 V^T.
/// diag must come from the same (n, tau, spec, q).
ReconstructionResult solve(const InverseProblem& problem, const Diagonalization& diag,
                           const DirichletLaplacian& lap, const PintOptions& options = {});

/// Builds the Laplacian and the diagonalization, then solves.
ReconstructionResult solve(const InverseProblem& problem, const PintOptions& options = {});

/// Recomputes the relative residual from problem data and result.trajectory.
double residual_check(const InverseProblem& problem, const ReconstructionResult& result);

}  // namespace isp

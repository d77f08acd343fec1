#pragma once

#include "isp/pint.hpp"

#include <Eigen/SparseCore>

namespace isp {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Which all-at-once matrix to assemble. The QBVM matrix has the block row
/// [beta I, 0, ..., 0, I]; the Kronecker variant is B (x) I - I (x) Delta_h with
/// block row [alpha I - Delta_h, 0, ..., 0, I/beta] and covers MQBVM and PQBVM.
enum class SystemVariant { qbvm, kronecker };

SystemVariant variant_for(Method method);

/// Sparse all-at-once system over the unknown ordering [f; u^1; ...; u^n],
/// each block of length dof.
struct BlockSparseSystem {
    SystemVariant variant = SystemVariant::kronecker;
    SparseMatrix A;
    Vector b;
    Eigen::Index block_size = 0;
    int blocks = 0;
};

/// Sparse -Delta_h (positive definite) for a grid.
SparseMatrix negative_laplacian(const SpatialGrid& grid);

BlockSparseSystem assemble(const InverseProblem& problem, SystemVariant variant);
/// Variant chosen from problem.spec.method.
BlockSparseSystem assemble(const InverseProblem& problem);

struct DirectSolution {
    Vector u;
    /// ||A u - b||_2 / ||b||_2 after refinement.
    double residual = 0.0;
    double factor_seconds = 0.0;
    double solve_seconds = 0.0;
    int refinement_steps = 0;
};

/// Sparse LU solve (UMFPACK) with up to three steps of iterative refinement
/// while the relative residual exceeds 1e-10. Throws SingularFactorization.
DirectSolution solve_direct(const BlockSparseSystem& system);

/// Reshapes a stacked solution into dof x (n+1) columns [f, u^1, ..., u^n].
Matrix unstack(const BlockSparseSystem& system, const Vector& u);

}  // namespace isp

#include "isp/allatonce.hpp"

#include "isp/errors.hpp"

#include <Eigen/UmfPackSupport>

#include <chrono>
#include <vector>

namespace isp {

namespace {

using Triplet = Eigen::Triplet<double>;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void add_laplacian(std::vector<Triplet>& out, const SpatialGrid& grid, Eigen::Index offset,
                   double diagonal_shift) {
    const int m = grid.m();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    const double centre = 2.0 * grid.dim() * inv_h2 + diagonal_shift;
    auto idx = [&](int i, int j) { return offset + Eigen::Index(j) * m + i; };
    if (grid.dim() == 1) {
        for (int i = 0; i < m; ++i) {
            out.emplace_back(offset + i, offset + i, centre);
            if (i > 0) out.emplace_back(offset + i, offset + i - 1, -inv_h2);
            if (i + 1 < m) out.emplace_back(offset + i, offset + i + 1, -inv_h2);
        }
        return;
    }
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const Eigen::Index row = idx(i, j);
            out.emplace_back(row, row, centre);
            if (i > 0) out.emplace_back(row, idx(i - 1, j), -inv_h2);
            if (i + 1 < m) out.emplace_back(row, idx(i + 1, j), -inv_h2);
            if (j > 0) out.emplace_back(row, idx(i, j - 1), -inv_h2);
            if (j + 1 < m) out.emplace_back(row, idx(i, j + 1), -inv_h2);
        }
    }
}

void add_identity(std::vector<Triplet>& out, Eigen::Index row0, Eigen::Index col0, Eigen::Index size,
                  double value) {
    for (Eigen::Index i = 0; i < size; ++i) out.emplace_back(row0 + i, col0 + i, value);
}

}  // namespace

SystemVariant variant_for(Method method) {
    return method == Method::qbvm ? SystemVariant::qbvm : SystemVariant::kronecker;
}

SparseMatrix negative_laplacian(const SpatialGrid& grid) {
    std::vector<Triplet> t;
    add_laplacian(t, grid, 0, 0.0);
    SparseMatrix L(grid.dof(), grid.dof());
    L.setFromTriplets(t.begin(), t.end());
    return L;
}

BlockSparseSystem assemble(const InverseProblem& problem, SystemVariant variant) {
    problem.validate();
    const Eigen::Index dof = problem.grid.dof();
    const int n = problem.timegrid.n();
    const double inv_tau = 1.0 / problem.timegrid.tau();
    const double beta = problem.spec.beta;
    const std::vector<double> q = problem.q_samples();

    BlockSparseSystem sys;
    sys.variant = variant;
    sys.block_size = dof;
    sys.blocks = n + 1;
    const Eigen::Index size = dof * (n + 1);

    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>((n + 1) * (5 * problem.grid.dim() + 3) * dof));
    sys.b = Vector::Zero(size);
    if (variant == SystemVariant::qbvm) {
        add_identity(t, 0, 0, dof, beta);
        add_identity(t, 0, dof * n, dof, 1.0);
        sys.b.head(dof) = problem.g_delta;
    } else {
        add_laplacian(t, problem.grid, 0, problem.spec.alpha);
        add_identity(t, 0, dof * n, dof, 1.0 / beta);
        sys.b.head(dof) = problem.g_delta / beta;
    }
    for (int j = 1; j <= n; ++j) {
        const Eigen::Index row0 = dof * j;
        add_identity(t, row0, 0, dof, -q[static_cast<std::size_t>(j - 1)]);
        add_laplacian(t, problem.grid, row0, inv_tau);
        if (j >= 2) add_identity(t, row0, row0 - dof, dof, -inv_tau);
    }
    sys.b.segment(dof, dof) = problem.phi * inv_tau;

    sys.A.resize(size, size);
    sys.A.setFromTriplets(t.begin(), t.end());
    sys.A.makeCompressed();
    return sys;
}

BlockSparseSystem assemble(const InverseProblem& problem) {
    return assemble(problem, variant_for(problem.spec.method));
}

DirectSolution solve_direct(const BlockSparseSystem& system) {
    DirectSolution out;
    const double b_norm = system.b.norm();
    auto relative = [&](const Vector& r) { return b_norm > 0.0 ? r.norm() / b_norm : r.norm(); };

    auto start = Clock::now();
    Eigen::UmfPackLU<SparseMatrix> lu;
    // The default ordering can run out of memory on the 1D block systems.
    lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_AMD;
    lu.compute(system.A);
    if (lu.info() != Eigen::Success) throw SingularFactorization("solve_direct: sparse LU failed");
    out.factor_seconds = seconds_since(start);

    start = Clock::now();
    out.u = lu.solve(system.b);
    if (lu.info() != Eigen::Success) throw SingularFactorization("solve_direct: sparse solve failed");
    Vector r = system.b - system.A * out.u;
    out.residual = relative(r);
    while (out.residual > 1e-10 && out.refinement_steps < 3) {
        out.u += lu.solve(r);
        r = system.b - system.A * out.u;
        out.residual = relative(r);
        ++out.refinement_steps;
    }
    out.solve_seconds = seconds_since(start);
    if (!std::isfinite(out.residual)) throw SingularFactorization("solve_direct: non-finite solution");
    return out;
}

Matrix unstack(const BlockSparseSystem& system, const Vector& u) {
    if (u.size() != system.block_size * system.blocks) throw InvalidArgument("unstack: length mismatch");
    return Eigen::Map<const Matrix>(u.data(), system.block_size, system.blocks);
}

}  // namespace isp

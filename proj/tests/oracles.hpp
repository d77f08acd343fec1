#pragma once

// Brute-force reference computations for the tests. Nothing here calls into
// the library's algorithms; only its plain value types are shared.

#include "isp/grid.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using isp::CMatrix;
using isp::Complex;
using isp::CVector;
using isp::Matrix;
using isp::Vector;

/// Dense Dirichlet Laplacian (negative semidefinite) on m interior nodes per axis.
inline Matrix dense_laplacian(int dim, int m) {
    const double h = std::numbers::pi / (m + 1);
    Matrix L1 = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        L1(i, i) = -2.0 / (h * h);
        if (i > 0) L1(i, i - 1) = 1.0 / (h * h);
        if (i + 1 < m) L1(i, i + 1) = 1.0 / (h * h);
    }
    if (dim == 1) return L1;
    const Matrix I = Matrix::Identity(m, m);
    Matrix L(m * m, m * m);
    // index j*m + i with i along x: kron(I_y, L_x) + kron(L_y, I_x)
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) L.block(a * m, b * m, m, m) = I(a, b) * L1 + L1(a, b) * I;
    return L;
}

/// Dense orthonormal DST-I along each axis, straight from the definition.
inline Matrix dst_matrix(int m) {
    Matrix S(m, m);
    const double scale = std::sqrt(2.0 / (m + 1));
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i) S(k, i) = scale * std::sin(std::numbers::pi * (i + 1) * (k + 1) / (m + 1));
    return S;
}

inline Vector naive_dst(int dim, int m, const Vector& v) {
    const Matrix S = dst_matrix(m);
    if (dim == 1) return S * v;
    const Eigen::Map<const Matrix> V(v.data(), m, m);  // column j = row y_j
    const Matrix out = S * V * S.transpose();
    return Eigen::Map<const Vector>(out.data(), m * m);
}

/// Dense time matrix written out entry by entry.
inline Matrix time_matrix(int n, double tau, double alpha, double beta, const std::vector<double>& q = {}) {
    Matrix B = Matrix::Zero(n + 1, n + 1);
    B(0, 0) = alpha;
    B(0, n) = 1.0 / beta;
    for (int j = 1; j <= n; ++j) {
        B(j, 0) = q.empty() ? -1.0 : -q[j - 1];
        B(j, j) = 1.0 / tau;
        if (j >= 2) B(j, j - 1) = -1.0 / tau;
    }
    return B;
}

/// kron(B, I) - kron(I, Lap) with block (j, k) = B(j, k) I - delta_jk Lap.
inline Matrix dense_all_at_once(const Matrix& B, const Matrix& lap) {
    const auto s = lap.rows();
    const auto nb = B.rows();
    Matrix A = Matrix::Zero(nb * s, nb * s);
    for (Eigen::Index j = 0; j < nb; ++j)
        for (Eigen::Index k = 0; k < nb; ++k) {
            A.block(j * s, k * s, s, s) = B(j, k) * Matrix::Identity(s, s);
            if (j == k) A.block(j * s, k * s, s, s) -= lap;
        }
    return A;
}

/// Roots of sum a_k z^k as eigenvalues of the companion matrix.
inline CVector companion_roots(const std::vector<Complex>& a) {
    const int n = static_cast<int>(a.size()) - 1;
    CMatrix C = CMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -a[i] / a[n];
    Eigen::ComplexEigenSolver<CMatrix> es(C, false);
    return es.eigenvalues();
}

/// Largest distance after greedily pairing every a_i with its nearest unused b_j.
inline double match_distance(const CVector& a, const CVector& b) {
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index arg = -1;
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(a[i] - b[j]);
            if (d < best) best = d, arg = j;
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

/// Adaptive Simpson quadrature.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                        int depth = 50) {
    struct Rec {
        const std::function<double(double)>& f;
        double run(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6 * (fa + 4 * flm + fm);
            const double right = (b - m) / 6 * (fm + 4 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
                return left + right + (left + right - whole) / 15;
            return run(a, m, fa, flm, fm, left, tol / 2, depth - 1) + run(m, b, fm, frm, fb, right, tol / 2, depth - 1);
        }
    } rec{f};
    // Split first so that oscillatory integrands are resolved.
    const int pieces = 64;
    double total = 0.0;
    for (int p = 0; p < pieces; ++p) {
        const double lo = a + (b - a) * p / pieces, hi = a + (b - a) * (p + 1) / pieces;
        const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
        total += rec.run(lo, hi, fa, fm, fb, (hi - lo) / 6 * (fa + 4 * fm + fb), tol / pieces, depth);
    }
    return total;
}

inline Vector random_vector(Eigen::Index size, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(size);
    for (auto& x : v) x = u(rng);
    return v;
}

inline CVector random_cvector(Eigen::Index size, std::mt19937_64& rng) {
    return random_vector(size, rng).cast<Complex>() + Complex(0, 1) * random_vector(size, rng).cast<Complex>();
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle

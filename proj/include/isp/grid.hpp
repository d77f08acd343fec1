#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace isp {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

/// Function of (x, y); the y argument is ignored on one-dimensional grids.
using SpaceFunction = std::function<double(double, double)>;

/// Uniform grid of interior nodes on (0,pi)^dim, dim in {1, 2}.
///
/// Node i (0-based) sits at x = (i+1) h with h = pi/(m+1). In 2D the unknown
/// at (i, j) is stored at index j*m + i (x fastest, then y).
class SpatialGrid {
public:
    SpatialGrid(int dim, int m);

    int dim() const { return dim_; }
    int m() const { return m_; }
    double h() const { return h_; }
    Eigen::Index dof() const { return dim_ == 1 ? m_ : Eigen::Index(m_) * m_; }

    double coordinate(int i) const { return (i + 1) * h_; }
    std::vector<double> nodes() const;

    /// Samples fn at every interior node in storage order.
    Vector sample(const SpaceFunction& fn) const;

    bool operator==(const SpatialGrid& other) const = default;

private:
    int dim_;
    int m_;
    double h_;
};

/// Discrete L2 norm sqrt(h^dim * sum v_i^2), the repo-wide convention.
double l2_norm(const SpatialGrid& grid, const Vector& v);
double l2_norm(const SpatialGrid& grid, const CVector& v);

class SineTransform;

/// Which algorithm shifted_solve should use.
enum class SolvePath {
    automatic,  // Thomas in 1D (spectral if Re d < 0), spectral in 2D
    thomas,     // 1D only
    spectral,   // sine transform, divide, inverse transform
};

/// Second-difference Dirichlet Laplacian Delta_h (3-point in 1D, 5-point in
/// 2D) on a SpatialGrid. Immutable after construction; every method is safe to
/// call concurrently.
class DirichletLaplacian {
public:
    explicit DirichletLaplacian(const SpatialGrid& grid);

    const SpatialGrid& grid() const { return grid_; }

    /// sigma_k = (4/h^2) sin^2(k h/2), k = 1..m: the eigenvalues of the 1D -Delta_h.
    /// In 2D the spectrum is {sigma_k + sigma_l}.
    std::span<const double> sine_spectrum() const { return sigma_; }
    double min_eigenvalue() const;
    double max_eigenvalue() const;

    /// y = Delta_h x (matrix-free stencil).
    Vector apply(const Vector& x) const;
    CVector apply(const CVector& x) const;

    /// Orthonormal DST-I along every axis; it is its own inverse.
    Vector sine_transform(const Vector& v) const;
    CVector sine_transform(const CVector& v) const;

    /// Solves (d I - Delta_h) x = r. Throws SingularShift when d + sigma is
    /// numerically zero for some eigenvalue sigma of -Delta_h.
    CVector shifted_solve(Complex d, const CVector& r, SolvePath path = SolvePath::automatic) const;
    Vector shifted_solve(double d, const Vector& r, SolvePath path = SolvePath::automatic) const;

private:
    template <typename Scalar>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply_impl(
        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const;
    template <typename Scalar>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_impl(
        Scalar d, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& r, SolvePath path) const;
    template <typename Scalar>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> thomas(
        Scalar d, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& r) const;
    template <typename Scalar>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> spectral(
        Scalar d, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& r) const;

    void check_shift(Complex d) const;

    SpatialGrid grid_;
    std::vector<double> sigma_;
    std::shared_ptr<const SineTransform> dst_;
};

}  // namespace isp

#include "isp/grid.hpp"

#include "isp/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

namespace isp {

namespace {

// The FFTW planner is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
    static std::mutex mutex;
    return mutex;
}

}  // namespace

/// Orthonormal DST-I backed by an FFTW RODFT00 plan. The plan is created with
/// FFTW_UNALIGNED so it may be executed on arbitrary caller buffers.
class SineTransform {
public:
    SineTransform(int dim, int m) : dim_(dim), m_(m) {
        const auto n = static_cast<std::size_t>(dim == 1 ? m : m * m);
        std::vector<double> in(n), out(n);
        std::lock_guard lock(planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        if (dim == 1) {
            plan_ = fftw_plan_r2r_1d(m, in.data(), out.data(), FFTW_RODFT00, flags);
        } else {
            plan_ = fftw_plan_r2r_2d(m, m, in.data(), out.data(), FFTW_RODFT00, FFTW_RODFT00, flags);
        }
        // RODFT00 computes 2 sum x_j sin(...) per axis.
        scale_ = std::pow(1.0 / std::sqrt(2.0 * (m + 1)), dim);
    }

    ~SineTransform() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }

    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;

    void execute(const double* in, double* out) const {
        fftw_execute_r2r(plan_, const_cast<double*>(in), out);
        const auto n = static_cast<std::size_t>(dim_ == 1 ? m_ : m_ * m_);
        for (std::size_t i = 0; i < n; ++i) out[i] *= scale_;
    }

private:
    int dim_;
    int m_;
    double scale_;
    fftw_plan plan_;
};

SpatialGrid::SpatialGrid(int dim, int m) : dim_(dim), m_(m), h_(std::numbers::pi / (m + 1)) {
    if (dim != 1 && dim != 2) throw InvalidArgument("SpatialGrid: dim must be 1 or 2");
    if (m < 1) throw InvalidArgument("SpatialGrid: m must be >= 1");
}

std::vector<double> SpatialGrid::nodes() const {
    std::vector<double> x(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) x[static_cast<std::size_t>(i)] = coordinate(i);
    return x;
}

Vector SpatialGrid::sample(const SpaceFunction& fn) const {
    Vector v(dof());
    if (dim_ == 1) {
        for (int i = 0; i < m_; ++i) v[i] = fn(coordinate(i), 0.0);
    } else {
        for (int j = 0; j < m_; ++j)
            for (int i = 0; i < m_; ++i) v[Eigen::Index(j) * m_ + i] = fn(coordinate(i), coordinate(j));
    }
    return v;
}

double l2_norm(const SpatialGrid& grid, const Vector& v) {
    return std::sqrt(std::pow(grid.h(), grid.dim()) * v.squaredNorm());
}

double l2_norm(const SpatialGrid& grid, const CVector& v) {
    return std::sqrt(std::pow(grid.h(), grid.dim()) * v.squaredNorm());
}

DirichletLaplacian::DirichletLaplacian(const SpatialGrid& grid)
    : grid_(grid), sigma_(static_cast<std::size_t>(grid.m())) {
    const double h = grid.h();
    for (int k = 1; k <= grid.m(); ++k) {
        const double s = std::sin(k * h / 2.0);
        sigma_[static_cast<std::size_t>(k - 1)] = 4.0 / (h * h) * s * s;
    }
    dst_ = std::make_shared<const SineTransform>(grid.dim(), grid.m());
}

double DirichletLaplacian::min_eigenvalue() const {
    return grid_.dim() * sigma_.front();
}

double DirichletLaplacian::max_eigenvalue() const {
    return grid_.dim() * sigma_.back();
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> DirichletLaplacian::apply_impl(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const {
    if (x.size() != grid_.dof()) throw InvalidArgument("Laplacian apply: size mismatch");
    const int m = grid_.m();
    const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(x.size());
    if (grid_.dim() == 1) {
        for (int i = 0; i < m; ++i) {
            Scalar s = -2.0 * x[i];
            if (i > 0) s += x[i - 1];
            if (i + 1 < m) s += x[i + 1];
            y[i] = s * inv_h2;
        }
        return y;
    }
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const Eigen::Index k = Eigen::Index(j) * m + i;
            Scalar s = -4.0 * x[k];
            if (i > 0) s += x[k - 1];
            if (i + 1 < m) s += x[k + 1];
            if (j > 0) s += x[k - m];
            if (j + 1 < m) s += x[k + m];
            y[k] = s * inv_h2;
        }
    }
    return y;
}

Vector DirichletLaplacian::apply(const Vector& x) const { return apply_impl(x); }
CVector DirichletLaplacian::apply(const CVector& x) const { return apply_impl(x); }

Vector DirichletLaplacian::sine_transform(const Vector& v) const {
    if (v.size() != grid_.dof()) throw InvalidArgument("sine_transform: size mismatch");
    Vector out(v.size());
    dst_->execute(v.data(), out.data());
    return out;
}

CVector DirichletLaplacian::sine_transform(const CVector& v) const {
    const Vector re = sine_transform(Vector(v.real()));
    const Vector im = sine_transform(Vector(v.imag()));
    CVector out(v.size());
    out.real() = re;
    out.imag() = im;
    return out;
}

void DirichletLaplacian::check_shift(Complex d) const {
    const double scale = std::max(std::abs(d), max_eigenvalue());
    const double tol = 1e-13 * scale;
    double gap = std::numeric_limits<double>::infinity();
    if (grid_.dim() == 1) {
        for (double s : sigma_) gap = std::min(gap, std::abs(d + s));
    } else {
        for (double a : sigma_)
            for (double b : sigma_) gap = std::min(gap, std::abs(d + a + b));
    }
    if (!(gap > tol)) {
        std::ostringstream msg;
        msg << "shifted_solve: shift " << d << " collides with the Laplacian spectrum (gap " << gap
            << ")";
        throw SingularShift(msg.str());
    }
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> DirichletLaplacian::thomas(
    Scalar d, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& r) const {
    // Tridiagonal (d + 2/h^2) on the diagonal, -1/h^2 off it.
    const int m = grid_.m();
    const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
    const Scalar diag = d + 2.0 * inv_h2;
    const double off = -inv_h2;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(m), x(m);
    Scalar pivot = diag;
    c[0] = off / pivot;
    x[0] = r[0] / pivot;
    for (int i = 1; i < m; ++i) {
        pivot = diag - off * c[i - 1];
        c[i] = off / pivot;
        x[i] = (r[i] - off * x[i - 1]) / pivot;
    }
    for (int i = m - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
    return x;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> DirichletLaplacian::spectral(
    Scalar d, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& r) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coeffs = sine_transform(r);
    const int m = grid_.m();
    if (grid_.dim() == 1) {
        for (int k = 0; k < m; ++k) coeffs[k] /= d + sigma_[static_cast<std::size_t>(k)];
    } else {
        for (int l = 0; l < m; ++l)
            for (int k = 0; k < m; ++k)
                coeffs[Eigen::Index(l) * m + k] /=
                    d + sigma_[static_cast<std::size_t>(k)] + sigma_[static_cast<std::size_t>(l)];
    }
    return sine_transform(coeffs);
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> DirichletLaplacian::solve_impl(
    Scalar d, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& r, SolvePath path) const {
    if (r.size() != grid_.dof()) throw InvalidArgument("shifted_solve: size mismatch");
    check_shift(Complex(d));
    if (path == SolvePath::automatic) {
        // Thomas without pivoting is only safe while the diagonal dominates.
        const bool dominant = std::real(Complex(d)) >= 0.0;
        path = (grid_.dim() == 1 && dominant) ? SolvePath::thomas : SolvePath::spectral;
    }
    if (path == SolvePath::thomas) {
        if (grid_.dim() != 1) throw InvalidArgument("shifted_solve: Thomas path is 1D only");
        return thomas(d, r);
    }
    return spectral(d, r);
}

CVector DirichletLaplacian::shifted_solve(Complex d, const CVector& r, SolvePath path) const {
    return solve_impl(d, r, path);
}

Vector DirichletLaplacian::shifted_solve(double d, const Vector& r, SolvePath path) const {
    return solve_impl(d, r, path);
}

}  // namespace isp

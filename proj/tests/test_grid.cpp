#include "isp/errors.hpp"
#include "isp/grid.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace isp;
using std::numbers::pi;

TEST_CASE("grid: spacing and node layout") {
    for (int m : {1, 3, 10, 255}) {
        const SpatialGrid g(1, m);
        CHECK(g.h() * (m + 1) == doctest::Approx(pi).epsilon(1e-15));
        CHECK(g.dof() == m);
        CHECK(g.coordinate(0) == doctest::Approx(g.h()));
    }
    const SpatialGrid g2(2, 4);
    CHECK(g2.dof() == 16);
    // x fastest
    const Vector v = g2.sample([](double x, double y) { return 10 * x + y; });
    CHECK(v[1] - v[0] == doctest::Approx(10 * g2.h()));
    CHECK(v[4] - v[0] == doctest::Approx(g2.h()));

    CHECK_THROWS_AS(SpatialGrid(3, 4), InvalidArgument);
    CHECK_THROWS_AS(SpatialGrid(1, 0), InvalidArgument);
}

TEST_CASE("grid: discrete L2 norm uses the h^dim weight") {
    const SpatialGrid g(1, 7);
    const Vector ones = Vector::Ones(7);
    CHECK(l2_norm(g, ones) == doctest::Approx(std::sqrt(7 * g.h())));
    const SpatialGrid g2(2, 5);
    CHECK(l2_norm(g2, Vector(Vector::Ones(25))) == doctest::Approx(std::sqrt(25 * g2.h() * g2.h())));
}

TEST_CASE("laplacian: three-point stencil on m = 3") {
    const SpatialGrid g(1, 3);
    CHECK(g.h() == doctest::Approx(pi / 4));
    const DirichletLaplacian lap(g);
    Vector e = Vector::Zero(3);
    e[1] = 1.0;
    const Vector y = lap.apply(e);
    const double h2 = g.h() * g.h();
    CHECK(y[0] == doctest::Approx(1.0 / h2));
    CHECK(y[1] == doctest::Approx(-2.0 / h2));
    CHECK(y[2] == doctest::Approx(1.0 / h2));

    CHECK(lap.sine_spectrum()[1] == doctest::Approx(32.0 / (pi * pi)));
}

TEST_CASE("laplacian: apply matches the dense matrix and the sine spectrum") {
    std::mt19937_64 rng(3);
    for (int dim : {1, 2}) {
        for (int m : {1, 2, 5, 9}) {
            const SpatialGrid g(dim, m);
            const DirichletLaplacian lap(g);
            const Vector x = oracle::random_vector(g.dof(), rng);
            const Matrix L = oracle::dense_laplacian(dim, m);
            CHECK((lap.apply(x) - L * x).norm() <= 1e-12 * (L * x).norm() + 1e-12);
            CHECK((L - L.transpose()).norm() == 0.0);
        }
    }
    const SpatialGrid g(1, 17);
    const DirichletLaplacian lap(g);
    for (int k = 1; k <= 17; ++k) {
        const Vector mode = g.sample([k](double x, double) { return std::sin(k * x); });
        const Vector err = lap.apply(mode) + lap.sine_spectrum()[k - 1] * mode;
        CHECK(err.lpNorm<Eigen::Infinity>() <= 1e-10 * lap.sine_spectrum()[k - 1]);
        CHECK(lap.sine_spectrum()[k - 1] > 0.0);
    }
}

TEST_CASE("laplacian: 2D mode (1,1) has eigenvalue 2 sigma_1") {
    const SpatialGrid g(2, 4);
    const DirichletLaplacian lap(g);
    const Vector v = g.sample([](double x, double y) { return std::sin(x) * std::sin(y); });
    const double s = 2 * lap.sine_spectrum()[0];
    CHECK((lap.apply(v) + s * v).norm() <= 1e-12 * s * v.norm());
    CHECK(lap.min_eigenvalue() == doctest::Approx(s));
}

TEST_CASE("sine transform: matches the definition and is self-inverse") {
    std::mt19937_64 rng(11);
    for (int dim : {1, 2}) {
        for (int m = 1; m <= (dim == 1 ? 40 : 12); ++m) {
            const SpatialGrid g(dim, m);
            const DirichletLaplacian lap(g);
            const Vector v = oracle::random_vector(g.dof(), rng);
            const Vector t = lap.sine_transform(v);
            CHECK((t - oracle::naive_dst(dim, m, v)).norm() <= 1e-13 * v.norm() * std::sqrt(double(g.dof())));
            CHECK((lap.sine_transform(t) - v).norm() <= 1e-13 * v.norm());
        }
    }
    for (int m : {63, 100, 255, 1023}) {
        const SpatialGrid g(1, m);
        const DirichletLaplacian lap(g);
        const CVector v = oracle::random_cvector(m, rng);
        CHECK((lap.sine_transform(lap.sine_transform(v)) - v).norm() <= 1e-13 * v.norm());
    }
}

TEST_CASE("shifted solve: worked examples") {
    SUBCASE("d = 0 on sin x") {
        const SpatialGrid g(1, 255);
        const DirichletLaplacian lap(g);
        const Vector r = g.sample([](double x, double) { return std::sin(x); });
        const Vector x = lap.shifted_solve(0.0, r);
        CHECK((x - r / lap.sine_spectrum()[0]).norm() <= 1e-12 * x.norm());
    }
    SUBCASE("d = 1+2i, random right-hand side, both paths") {
        std::mt19937_64 rng(5);
        const SpatialGrid g(1, 31);
        const DirichletLaplacian lap(g);
        const CVector r = oracle::random_cvector(31, rng);
        const Complex d(1.0, 2.0);
        for (SolvePath path : {SolvePath::thomas, SolvePath::spectral, SolvePath::automatic}) {
            const CVector x = lap.shifted_solve(d, r, path);
            CHECK((d * x - lap.apply(x) - r).norm() <= 1e-12 * r.norm());
        }
    }
    SUBCASE("2D single tensor mode") {
        const SpatialGrid g(2, 31);
        const DirichletLaplacian lap(g);
        const Vector r = g.sample([](double x, double y) { return std::sin(2 * x) * std::sin(y); });
        const auto s = lap.sine_spectrum();
        const Vector x = lap.shifted_solve(3.0, r);
        CHECK((x - r / (3.0 + s[1] + s[0])).norm() <= 1e-12 * x.norm());
    }
}

TEST_CASE("shifted solve: properties on random inputs") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 60);
        const SpatialGrid g(1, m);
        const DirichletLaplacian lap(g);
        const Complex d(10 * std::abs(u(rng)), 50 * u(rng));
        const CVector r1 = oracle::random_cvector(m, rng), r2 = oracle::random_cvector(m, rng);
        const Complex a(u(rng), u(rng)), b(u(rng), u(rng));

        const CVector lhs = lap.shifted_solve(d, CVector(a * r1 + b * r2));
        const CVector rhs = a * lap.shifted_solve(d, r1) + b * lap.shifted_solve(d, r2);
        CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());

        const CVector thomas = lap.shifted_solve(d, r1, SolvePath::thomas);
        const CVector spectral = lap.shifted_solve(d, r1, SolvePath::spectral);
        CHECK((thomas - spectral).norm() <= 1e-11 * thomas.norm());

        const double dr = 5 * std::abs(u(rng));
        const Vector rr = oracle::random_vector(m, rng);
        const CVector xc = lap.shifted_solve(Complex(dr, 0.0), rr.cast<Complex>());
        CHECK(xc.imag().norm() <= 1e-13 * xc.norm());
        CHECK((xc.real() - lap.shifted_solve(dr, rr)).norm() <= 1e-13 * xc.norm());
    }
}

TEST_CASE("shifted solve: 2D on random complex shifts") {
    std::mt19937_64 rng(23);
    const SpatialGrid g(2, 20);
    const DirichletLaplacian lap(g);
    const CVector r = oracle::random_cvector(g.dof(), rng);
    for (Complex d : {Complex(0.5, 0.0), Complex(-1.0, 3.0), Complex(100.0, -40.0)}) {
        const CVector x = lap.shifted_solve(d, r);
        CHECK((d * x - lap.apply(x) - r).norm() <= 1e-12 * r.norm());
    }
}

TEST_CASE("shifted solve: eigenvalue collision raises SingularShift") {
    const SpatialGrid g(1, 15);
    const DirichletLaplacian lap(g);
    const CVector r = CVector::Ones(15);
    const double s = lap.sine_spectrum()[2];
    CHECK_THROWS_AS(lap.shifted_solve(Complex(-s, 0.0), r), SingularShift);
    CHECK_THROWS_AS(lap.shifted_solve(-s, Vector(Vector::Ones(15))), SingularShift);
    CHECK_NOTHROW(lap.shifted_solve(Complex(-s, 1.0), r));
    CHECK_THROWS_AS(lap.shifted_solve(Complex(1.0, 0.0), CVector(CVector::Ones(3))), InvalidArgument);
    const SpatialGrid g2(2, 4);
    CHECK_THROWS_AS(DirichletLaplacian(g2).shifted_solve(1.0, Vector(Vector::Ones(16)), SolvePath::thomas),
                    InvalidArgument);
}

#include "isp/errors.hpp"
#include "isp/roots.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace isp;

namespace {

CVector as_vector(const std::vector<Complex>& v) {
    return Eigen::Map<const CVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Polynomial unit_alpha_star(int n, double c) {
    Polynomial p;
    p.coeffs.assign(static_cast<std::size_t>(n + 2), 1.0);
    p.coeffs[0] = c;
    return p;
}

}  // namespace

TEST_CASE("roots: quadratic 2 + mu + mu^2") {
    const Polynomial p{{2.0, 1.0, 1.0}};
    const CVector roots = as_vector(find_roots(p));
    CVector expected(2);
    expected << Complex(-0.5, std::sqrt(7.0) / 2), Complex(-0.5, -std::sqrt(7.0) / 2);
    CHECK(oracle::match_distance(roots, expected) <= 1e-14);
    for (const auto& z : roots) CHECK(std::abs(z) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("roots: match the companion matrix") {
    SUBCASE("n = 8, c = 5") {
        const Polynomial p = unit_alpha_star(8, 5.0);
        const CVector roots = as_vector(find_roots(p));
        CHECK(roots.size() == 9);
        CHECK(oracle::match_distance(roots, oracle::companion_roots(p.coeffs)) <= 1e-9);
    }
    SUBCASE("random complex coefficients") {
        std::mt19937_64 rng(101);
        for (int deg : {1, 3, 7, 20, 40}) {
            const CVector a = oracle::random_cvector(deg + 1, rng);
            const Polynomial p{{a.data(), a.data() + a.size()}};
            const CVector roots = as_vector(find_roots(p));
            CHECK(oracle::match_distance(roots, oracle::companion_roots(p.coeffs)) <= 1e-8);
        }
    }
}

TEST_CASE("roots: annulus of c + mu + ... + mu^{n+1}") {
    for (int n : {1, 16, 100, 500}) {
        for (double c : {1.5, 2.0, 50.0, 1e4}) {
            const CVector roots = as_vector(find_roots(unit_alpha_star(n, c)));
            for (const auto& z : roots) {
                CHECK(std::abs(z) > 1.0);
                CHECK(std::pow(std::abs(z), n + 1) < 2 * c - 1);
            }
        }
    }
}

TEST_CASE("roots: residual invariant on large degree") {
    const int n = 1024;
    const double c = 10.0;
    const Polynomial p = unit_alpha_star(n, c);
    const auto roots = find_roots(p);
    for (const auto& z : roots) {
        CHECK(std::abs(p(z)) <= 1e-9 * p.max_abs_coeff() * std::pow(std::max(1.0, std::abs(z)), n + 1));
    }
}

TEST_CASE("roots: synthetic division") {
    // (z - 1)(z - 2)(z + 3) = z^3 - 7z + 6
    const Polynomial p{{6.0, -7.0, 0.0, 1.0}};
    Complex rem;
    const Polynomial q = synthetic_division(p, 1.0, rem);
    CHECK(std::abs(rem) == 0.0);
    REQUIRE(q.degree() == 2);
    CHECK(std::abs(q.coeffs[0] - Complex(-6.0)) == 0.0);
    CHECK(std::abs(q.coeffs[1] - Complex(1.0)) == 0.0);
    CHECK(std::abs(q.coeffs[2] - Complex(1.0)) == 0.0);
    synthetic_division(p, 4.0, rem);
    CHECK(std::abs(rem - p(4.0)) <= 1e-12);
}

TEST_CASE("roots: invalid input") {
    CHECK_THROWS_AS(find_roots(Polynomial{{1.0, 0.0}}), InvalidArgument);
    CHECK_THROWS_AS(find_roots(Polynomial{{1.0}}), InvalidArgument);
    RootFinderOptions tight;
    tight.max_iters = 1;
    CHECK_THROWS_AS(find_roots(unit_alpha_star(200, 3.0), tight), NoConvergence);
}

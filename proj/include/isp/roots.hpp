#pragma once

#include "isp/grid.hpp"

#include <vector>

namespace isp {

/// Polynomial with coefficients in ascending order: p(z) = sum_k a[k] z^k.
struct Polynomial {
    std::vector<Complex> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    Complex operator()(Complex z) const;
    double max_abs_coeff() const;
};

/// Divides p by (z - root). Returns the quotient and stores the remainder.
Polynomial synthetic_division(const Polynomial& p, Complex root, Complex& remainder);

struct RootFinderOptions {
    /// Radius of the circle carrying the initial guesses.
    double initial_radius = 1.1;
    int max_iters = 500;
    double correction_tol = 1e-13;
    double residual_tol = 1e-9;
};

/// All roots of p by the Aberth-Ehrlich simultaneous iteration.
///
/// Initial guesses are equispaced on a circle with a fixed angular offset. A
/// root is frozen once its Newton correction falls below
/// correction_tol*(1+|z|) or |p(z)| reaches the rounding level of the Horner
/// evaluation. Throws NoConvergence if max_iters is exhausted or a root fails
/// the a-posteriori residual check.
std::vector<Complex> find_roots(const Polynomial& p, const RootFinderOptions& options = {});

}  // namespace isp

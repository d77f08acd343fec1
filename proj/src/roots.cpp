#include "isp/roots.hpp"

#include "isp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace isp {

namespace {

struct Evaluation {
    Complex newton;   // p(z)/p'(z)
    bool at_noise;    // |p(z)| is within rounding error of zero
};

// Horner for p and p'. For |z| > 1 the reversed polynomial is evaluated at
// 1/z instead, which keeps every intermediate bounded.
Evaluation evaluate(const std::vector<Complex>& a, Complex z) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const int n = static_cast<int>(a.size()) - 1;
    const double r = std::abs(z);
    if (r <= 1.0) {
        Complex p = a[static_cast<std::size_t>(n)], dp = 0.0;
        double bound = std::abs(p);
        for (int k = n - 1; k >= 0; --k) {
            dp = dp * z + p;
            p = p * z + a[static_cast<std::size_t>(k)];
            bound = bound * r + std::abs(a[static_cast<std::size_t>(k)]);
        }
        return {p / dp, std::abs(p) <= 8.0 * eps * bound};
    }
    // p(z) = z^n q(w), q(w) = sum a[n-k] w^k, w = 1/z
    // p'(z)/p(z) = w (n - w q'(w)/q(w))
    const Complex w = 1.0 / z;
    const double rw = 1.0 / r;
    Complex q = a[0], dq = 0.0;
    double bound = std::abs(q);
    for (int k = 1; k <= n; ++k) {
        dq = dq * w + q;
        q = q * w + a[static_cast<std::size_t>(k)];
        bound = bound * rw + std::abs(a[static_cast<std::size_t>(k)]);
    }
    const Complex ratio = w * (static_cast<double>(n) - w * dq / q);
    return {1.0 / ratio, std::abs(q) <= 8.0 * eps * bound};
}

}  // namespace

Complex Polynomial::operator()(Complex z) const {
    Complex p = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) p = p * z + *it;
    return p;
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs) m = std::max(m, std::abs(c));
    return m;
}

Polynomial synthetic_division(const Polynomial& p, Complex root, Complex& remainder) {
    const int n = p.degree();
    if (n < 1) throw InvalidArgument("synthetic_division: degree must be >= 1");
    Polynomial q;
    q.coeffs.assign(static_cast<std::size_t>(n), 0.0);
    Complex carry = p.coeffs[static_cast<std::size_t>(n)];
    for (int k = n - 1; k >= 0; --k) {
        q.coeffs[static_cast<std::size_t>(k)] = carry;
        carry = p.coeffs[static_cast<std::size_t>(k)] + carry * root;
    }
    remainder = carry;
    return q;
}

std::vector<Complex> find_roots(const Polynomial& p, const RootFinderOptions& options) {
    const int n = p.degree();
    if (n < 1) throw InvalidArgument("find_roots: degree must be >= 1");
    if (p.coeffs.back() == Complex(0.0)) throw InvalidArgument("find_roots: leading coefficient is zero");

    const auto& a = p.coeffs;
    // Fixed offset so that conjugate-symmetric polynomials do not trap guesses
    // on the real axis.
    constexpr double offset = 0.4;
    std::vector<Complex> z(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        z[static_cast<std::size_t>(k)] =
            std::polar(options.initial_radius, 2.0 * std::numbers::pi * k / n + offset);
    }
    std::vector<char> done(static_cast<std::size_t>(n), 0);
    int remaining = n;

    for (int iter = 0; iter < options.max_iters && remaining > 0; ++iter) {
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (done[k]) continue;
            const Evaluation ev = evaluate(a, z[k]);
            if (ev.at_noise || !std::isfinite(std::abs(ev.newton))) {
                done[k] = 1;
                --remaining;
                continue;
            }
            Complex repulsion = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j) {
                if (j != k) repulsion += 1.0 / (z[k] - z[j]);
            }
            const Complex correction = ev.newton / (1.0 - ev.newton * repulsion);
            z[k] -= correction;
            if (std::abs(correction) < options.correction_tol * (1.0 + std::abs(z[k]))) {
                done[k] = 1;
                --remaining;
            }
        }
    }
    if (remaining > 0) {
        std::ostringstream msg;
        msg << "find_roots: " << remaining << " of " << n << " roots unconverged after "
            << options.max_iters << " iterations";
        throw NoConvergence(msg.str());
    }

    const double scale = p.max_abs_coeff();
    for (const auto& root : z) {
        const double growth = std::pow(std::max(1.0, std::abs(root)), n);
        if (!(std::abs(p(root)) <= options.residual_tol * scale * growth)) {
            std::ostringstream msg;
            msg << "find_roots: residual check failed at " << root;
            throw NoConvergence(msg.str());
        }
    }
    return z;
}

}  // namespace isp

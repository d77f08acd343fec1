#include "isp/timedisc.hpp"

#include "isp/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace isp {

TimeGrid::TimeGrid(double T, int n) : T_(T), n_(n), tau_(T / n) {
    if (!(T > 0.0)) throw InvalidArgument("TimeGrid: T must be positive");
    if (n < 1) throw InvalidArgument("TimeGrid: n must be >= 1");
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::qbvm: return "qbvm";
        case Method::mqbvm: return "mqbvm";
        case Method::pqbvm: return "pqbvm";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "qbvm") return Method::qbvm;
    if (name == "mqbvm") return Method::mqbvm;
    if (name == "pqbvm") return Method::pqbvm;
    throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(InverseMethod method) {
    return method == InverseMethod::closed_form ? "closed_form" : "linear_solve";
}

RegularizationSpec RegularizationSpec::qbvm(double beta) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    return {Method::qbvm, beta, 0.0};
}

RegularizationSpec RegularizationSpec::mqbvm(double beta) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    return {Method::mqbvm, beta, 0.0};
}

RegularizationSpec RegularizationSpec::pqbvm(double beta, const TimeGrid& timegrid) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    return {Method::pqbvm, beta, alpha_star(beta, timegrid)};
}

double RegularizationSpec::c(const TimeGrid& timegrid) const {
    return beta / (timegrid.tau() * timegrid.tau());
}

double RegularizationSpec::alpha_star(double beta, const TimeGrid& timegrid) {
    return 1.0 / timegrid.tau() + timegrid.tau() / beta;
}

bool RegularizationSpec::uses_alpha_star(const TimeGrid& timegrid) const {
    const double target = alpha_star(beta, timegrid);
    return std::abs(alpha - target) <= 1e-14 * target;
}

std::vector<double> sample_time_source(const TimeGrid& timegrid,
                                       const std::function<double(double)>& q) {
    std::vector<double> out(static_cast<std::size_t>(timegrid.n()));
    for (int j = 1; j <= timegrid.n(); ++j) out[static_cast<std::size_t>(j - 1)] = q(timegrid.time(j));
    return out;
}

TimeMatrix::TimeMatrix(const TimeGrid& timegrid, const RegularizationSpec& spec, std::vector<double> q)
    : timegrid_(timegrid), spec_(spec), q_(std::move(q)) {
    if (q_.empty()) q_.assign(static_cast<std::size_t>(timegrid.n()), 1.0);
    if (static_cast<int>(q_.size()) != timegrid.n()) throw InvalidArgument("TimeMatrix: q must have length n");
    for (double v : q_) {
        if (!(v > 0.0)) throw InvalidArgument("TimeMatrix: q must be positive");
    }
    unit_q_ = std::all_of(q_.begin(), q_.end(), [](double v) { return v == 1.0; });
}

Matrix TimeMatrix::dense() const {
    const int n = timegrid_.n();
    const double inv_tau = 1.0 / timegrid_.tau();
    Matrix B = Matrix::Zero(n + 1, n + 1);
    B(0, 0) = spec_.alpha;
    B(0, n) = 1.0 / spec_.beta;
    for (int j = 1; j <= n; ++j) {
        B(j, 0) = -q_[static_cast<std::size_t>(j - 1)];
        B(j, j) = inv_tau;
        if (j >= 2) B(j, j - 1) = -inv_tau;
    }
    return B;
}

TimeMatrix build_time_matrix(const TimeGrid& timegrid, const RegularizationSpec& spec, std::vector<double> q) {
    if (timegrid.n() < 2) throw InvalidArgument("build_time_matrix: n must be >= 2");
    if (spec.method == Method::qbvm) {
        throw InvalidArgument("build_time_matrix: QBVM has no Kronecker form");
    }
    if (!(spec.beta > 0.0)) throw InvalidArgument("build_time_matrix: beta must be positive");
    if (spec.alpha < 0.0) throw InvalidArgument("build_time_matrix: alpha must be >= 0");
    return TimeMatrix(timegrid, spec, std::move(q));
}

Polynomial psi_polynomial(const TimeGrid& timegrid, const RegularizationSpec& spec) {
    // (mu-1) [mu^{n+1} + ... + mu^2 + (alpha c tau - c) mu + c]
    //   = mu^{n+2} + (alpha c tau - c - 1) mu^2 + (2c - alpha c tau) mu - c
    const int n = timegrid.n();
    const double c = spec.c(timegrid);
    const double act = spec.uses_alpha_star(timegrid) ? c + 1.0 : spec.alpha * c * timegrid.tau();
    Polynomial psi;
    psi.coeffs.assign(static_cast<std::size_t>(n + 3), 0.0);
    psi.coeffs[0] = -c;
    psi.coeffs[1] = 2.0 * c - act;
    psi.coeffs[2] += act - c - 1.0;
    psi.coeffs[static_cast<std::size_t>(n + 2)] += 1.0;
    return psi;
}

Polynomial characteristic_polynomial(const TimeGrid& timegrid, const RegularizationSpec& spec,
                                     const std::vector<double>& q) {
    const int n = timegrid.n();
    const double c = spec.c(timegrid);
    const bool unit = q.empty() || std::all_of(q.begin(), q.end(), [](double v) { return v == 1.0; });
    if (!q.empty() && static_cast<int>(q.size()) != n) {
        throw InvalidArgument("characteristic_polynomial: q must have length n");
    }

    Polynomial p;
    if (unit && spec.uses_alpha_star(timegrid)) {
        p.coeffs.assign(static_cast<std::size_t>(n + 2), 1.0);
        p.coeffs[0] = c;
        return p;
    }
    if (unit) {
        const Polynomial psi = psi_polynomial(timegrid, spec);
        Complex remainder;
        p = synthetic_division(psi, 1.0, remainder);
        if (!(std::abs(remainder) <= 1e-10 * psi.max_abs_coeff())) {
            std::ostringstream msg;
            msg << "characteristic_polynomial: deflation remainder " << std::abs(remainder);
            throw DeflationFailure(msg.str());
        }
        return p;
    }
    // Row 0 of B v = lambda v with v_0 = 1/tau, v_j = sum_{i<=j} q_i mu^{j-i+1},
    // multiplied through by beta mu and divided by tau^2.
    p.coeffs.assign(static_cast<std::size_t>(n + 2), 0.0);
    for (int i = 1; i <= n; ++i) p.coeffs[static_cast<std::size_t>(n + 2 - i)] = q[static_cast<std::size_t>(i - 1)];
    p.coeffs[1] += spec.alpha * c * timegrid.tau() - c;
    p.coeffs[0] = c;
    return p;
}

double min_root_gap(const CVector& mu) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < mu.size(); ++j)
        for (Eigen::Index k = j + 1; k < mu.size(); ++k) gap = std::min(gap, std::abs(mu[j] - mu[k]));
    return gap;
}

double norm1(const CMatrix& a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

CMatrix eigenvector_matrix(const TimeMatrix& tm, const CVector& mu) {
    const int n = tm.timegrid().n();
    const double tau = tm.timegrid().tau();
    CMatrix V(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        const Complex z = mu[k];
        V(0, k) = (z - 1.0) / tau;
        if (tm.unit_q()) {
            // Long double keeps the n-fold product accurate enough for row 0,
            // where mu^{n+1} is multiplied by 1/beta.
            const std::complex<long double> zl(z.real(), z.imag());
            std::complex<long double> power = zl;
            for (int j = 1; j <= n; ++j) {
                power *= zl;
                const std::complex<long double> v = power - zl;
                V(j, k) = Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
            }
        } else {
            Complex s = 0.0;
            for (int j = 1; j <= n; ++j) {
                s = z * (tm.q()[static_cast<std::size_t>(j - 1)] + s);
                V(j, k) = (z - 1.0) * s;
            }
        }
    }
    return V;
}

CMatrix lagrange_coefficients(const CVector& mu, double c) {
    const Eigen::Index size = mu.size();  // n + 1
    const double n = static_cast<double>(size - 1);
    CMatrix L(size, size);
    for (Eigen::Index j = 0; j < size; ++j) {
        const Complex inv = 1.0 / mu[j];
        const Complex tail = std::pow(inv, static_cast<int>(size));  // mu^{-n-1}
        const Complex denom = n + 2.0 + (c - 1.0) * tail;
        Complex power = 1.0;  // mu^{-k}, k = 0-based column
        for (Eigen::Index k = 0; k < size; ++k) {
            L(j, k) = (power - tail) / denom;
            power *= inv;
        }
    }
    return L;
}

CMatrix closed_form_inverse(const CVector& mu, const TimeGrid& timegrid, double c) {
    const Eigen::Index size = mu.size();
    const int n = static_cast<int>(size - 1);
    const double tau = timegrid.tau();
    const CMatrix L = lagrange_coefficients(mu, c);
    const CVector L1 = L.rowwise().sum();  // L_j(1)
    const double shift = n + c + 1.0;
    CMatrix W(size, size);
    // The case split follows the column index of W: column k (1-based, k < n+1)
    // picks up L_{j,k+1}; the last column has no such term.
    for (Eigen::Index j = 0; j < size; ++j) {
        W(j, 0) = c * tau * L1[j] / shift - tau * L(j, 0);
        for (Eigen::Index k = 1; k < n; ++k) W(j, k) = L(j, k + 1) - L1[j] / shift;
        W(j, n) = -L1[j] / shift;
    }
    return W;
}

namespace {

// Newton steps on the sparse psi in long double. Horner on the dense
// characteristic polynomial leaves errors of O(n eps); psi has four nonzero
// coefficients, so its residual stays at O(c eps).
void polish_roots(const Polynomial& psi, std::vector<Complex>& roots) {
    using CL = std::complex<long double>;
    const int top = psi.degree();
    auto eval = [&](CL z, CL& deriv) {
        CL high = 1.0L, base = z;
        for (int e = top - 1; e > 0; e >>= 1, base *= base)
            if (e & 1) high *= base;
        // high = z^{top-1}
        const long double a0 = psi.coeffs[0].real(), a1 = psi.coeffs[1].real(), a2 = psi.coeffs[2].real();
        deriv = static_cast<long double>(top) * high + a1 + 2.0L * a2 * z;
        return high * z + a2 * z * z + a1 * z + a0;
    };
    for (Complex& root : roots) {
        CL z(root.real(), root.imag());
        CL deriv;
        long double best = std::abs(eval(z, deriv));
        for (int it = 0; it < 3 && best > 0.0L; ++it) {
            const CL next = z - eval(z, deriv) / deriv;
            CL unused;
            const long double value = std::abs(eval(next, unused));
            if (!(value < best)) break;
            z = next;
            best = value;
        }
        root = Complex(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    }
}

}  // namespace

Diagonalization diagonalize(const TimeMatrix& tm, const DiagonalizeOptions& options) {
    const TimeGrid& tg = tm.timegrid();
    const RegularizationSpec& spec = tm.spec();
    const double tau = tg.tau();
    const double c = spec.c(tg);

    Diagonalization d;
    bool have_roots = false;
    if (!options.force_dense) {
        try {
            const Polynomial p = characteristic_polynomial(tg, spec, tm.q());
            RootFinderOptions ropt;
            // |a_0/a_N|^{1/N}: for alpha_* and c > 1 this is c^{1/(n+1)}, inside
            // the root annulus 1 < |mu| < (2c-1)^{1/(n+1)}.
            ropt.initial_radius = std::pow(std::abs(p.coeffs.front() / p.coeffs.back()), 1.0 / p.degree());
            auto roots = find_roots(p, ropt);
            if (tm.unit_q()) polish_roots(psi_polynomial(tg, spec), roots);
            d.mu = Eigen::Map<const CVector>(roots.data(), static_cast<Eigen::Index>(roots.size()));
            d.eigen_source = EigenSource::polynomial_roots;
            have_roots = true;
        } catch (const NoConvergence&) {
        } catch (const DeflationFailure&) {
        }
    }
    if (!have_roots) {
        Eigen::EigenSolver<Matrix> solver(tm.dense(), false);
        if (solver.info() != Eigen::Success) throw NoConvergence("diagonalize: dense eigensolver failed");
        const CVector lambda = solver.eigenvalues();
        d.mu = (1.0 / (1.0 - tau * lambda.array())).matrix();
        d.eigen_source = EigenSource::dense_eigensolver;
    }

    const double max_mu = d.mu.cwiseAbs().maxCoeff();
    const double gap = min_root_gap(d.mu);
    // A double root comes back as a pair split by roughly sqrt(eps), so the
    // gate sits well above that.
    if (!(gap > 1e-7 * max_mu)) {
        std::ostringstream msg;
        msg << "diagonalize: eigen-parameters not distinct (min gap " << gap << ")";
        throw NearDefectiveMatrix(msg.str());
    }

    d.lambda = ((1.0 - 1.0 / d.mu.array()) / tau).matrix();
    d.V = eigenvector_matrix(tm, d.mu);

    d.guaranteed = tm.unit_q() && spec.uses_alpha_star(tg) && c > 1.0;
    if (options.closed_form && d.guaranteed) {
        d.W = closed_form_inverse(d.mu, tg, c);
        d.w_method = InverseMethod::closed_form;
    } else {
        d.W = d.V.partialPivLu().inverse();
        d.w_method = InverseMethod::linear_solve;
    }
    d.kappa1 = norm1(d.V) * norm1(d.W);
    return d;
}

ConditionReport condition_report(const Diagonalization& diag, const RegularizationSpec& spec,
                                 const TimeGrid& timegrid) {
    ConditionReport r;
    r.norm1_V = norm1(diag.V);
    r.norm1_W = norm1(diag.W);
    r.kappa1 = r.norm1_V * r.norm1_W;
    const int n = timegrid.n();
    const double c = spec.c(timegrid);
    if (n > 11 && spec.uses_alpha_star(timegrid) && c > 1.0) {
        r.bound_V = (2.0 * c / timegrid.T()) * n + (4.0 * c - 2.0) * n;
        r.bound_W = (8.0 + 4.0 * timegrid.tau() * (n + 2)) / n;
    }
    return r;
}

}  // namespace isp

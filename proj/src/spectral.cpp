#include "isp/spectral.hpp"

#include "isp/errors.hpp"

#include <cmath>

namespace isp {

namespace {

void check_same_length(const SpectralField& a, const SpectralField& b) {
    if (a.coeffs.size() != b.coeffs.size()) throw InvalidArgument("spectral fields differ in L_max");
}

}  // namespace

SpectralField sine_coefficients(const SpatialGrid& grid, const Vector& v, int L_max) {
    if (grid.dim() != 1) throw InvalidArgument("sine_coefficients: one-dimensional grids only");
    if (v.size() != grid.dof()) throw InvalidArgument("sine_coefficients: field has wrong length");
    if (L_max < 1 || L_max > grid.m()) throw InvalidArgument("sine_coefficients: need 1 <= L_max <= m");
    const DirichletLaplacian lap(grid);
    SpectralField out;
    out.coeffs = std::sqrt(grid.h()) * lap.sine_transform(v).head(L_max);
    return out;
}

SpectralField sine_coefficients(const std::function<double(double)>& v, int L_max, int nodes) {
    if (L_max < 1) throw InvalidArgument("sine_coefficients: L_max must be >= 1");
    const SpatialGrid grid(1, nodes > 0 ? nodes : 16 * L_max - 1);
    return sine_coefficients(grid, grid.sample([&](double x, double) { return v(x); }), L_max);
}

double regularized_filter(int l, double T, double alpha, double beta) {
    const double lambda = SpectralField::eigenvalue(l);
    return lambda / (-std::expm1(-lambda * T) + alpha * beta * lambda + beta * lambda * lambda);
}

SpectralField exact_source(const SpectralField& g, const SpectralField& phi, double T) {
    check_same_length(g, phi);
    SpectralField f;
    f.coeffs.resize(g.coeffs.size());
    for (int l = 1; l <= g.L_max(); ++l) {
        const double lambda = SpectralField::eigenvalue(l);
        const double decay = std::exp(-lambda * T);
        f.coeffs[l - 1] = lambda / -std::expm1(-lambda * T) * (g.coeffs[l - 1] - decay * phi.coeffs[l - 1]);
    }
    return f;
}

SpectralField regularized_source(const SpectralField& g, const SpectralField& phi, double T,
                                 double alpha, double beta) {
    check_same_length(g, phi);
    if (!(beta > 0.0)) throw InvalidArgument("regularized_source: beta must be positive");
    if (!(alpha >= 0.0)) throw InvalidArgument("regularized_source: alpha must be >= 0");
    SpectralField f;
    f.coeffs.resize(g.coeffs.size());
    for (int l = 1; l <= g.L_max(); ++l) {
        const double decay = std::exp(-SpectralField::eigenvalue(l) * T);
        f.coeffs[l - 1] = regularized_filter(l, T, alpha, beta) * (g.coeffs[l - 1] - decay * phi.coeffs[l - 1]);
    }
    return f;
}

double a_priori_beta(double p, double delta, double E_f, double tau) {
    if (!(p >= 0.0)) throw InvalidArgument("a_priori_beta: p must be >= 0");
    if (!(delta > 0.0) || !(E_f > 0.0) || !(tau > 0.0)) {
        throw InvalidArgument("a_priori_beta: delta, E_f and tau must be positive");
    }
    const double ratio = delta / E_f;
    if (p < 2.0) return tau * std::pow(ratio, 2.0 / (p + 2.0));
    if (p < 4.0) return tau * std::sqrt(ratio);
    return tau * std::sqrt(ratio) / std::sqrt(tau + 1.0);
}

}  // namespace isp

#pragma once

#include "isp/grid.hpp"

#include <functional>

namespace isp {

/// Sine-series coefficients (v, X_l), l = 1..L_max, against the orthonormal
/// eigenfunctions X_l = sqrt(2/pi) sin(l x) of -d^2/dx^2 on (0, pi) with
/// eigenvalues lambda_l = l^2. coeffs[l-1] holds the l-th coefficient.
struct SpectralField {
    Vector coeffs;

    int L_max() const { return static_cast<int>(coeffs.size()); }
    static double eigenvalue(int l) { return static_cast<double>(l) * l; }
    /// L2(0, pi) norm of the truncated series (Parseval).
    double norm() const { return coeffs.norm(); }
};

/// Coefficients of grid samples via the orthonormal DST: (v, X_l) = sqrt(h) DST(v)_l.
/// One-dimensional grids only; L_max <= m.
SpectralField sine_coefficients(const SpatialGrid& grid, const Vector& v, int L_max);

/// Coefficients of a function on (0, pi), by the same rule on a grid of
/// `nodes` interior points (default 16 L_max - 1).
SpectralField sine_coefficients(const std::function<double(double)>& v, int L_max, int nodes = 0);

/// Inverts the continuum forward map:
/// (f, X_l) = lambda_l / (1 - e^{-lambda_l T}) ((g, X_l) - e^{-lambda_l T} (phi, X_l)).
SpectralField exact_source(const SpectralField& g, const SpectralField& phi, double T);

/// Regularized source with filter lambda / (1 - e^{-lambda T} + alpha beta lambda + beta lambda^2).
SpectralField regularized_source(const SpectralField& g, const SpectralField& phi, double T,
                                 double alpha, double beta);

/// The filter factor applied by regularized_source to mode l.
double regularized_filter(int l, double T, double alpha, double beta);

/// A-priori smoothness bound ||f||_{H^p} <= E_f.
struct SourcePrior {
    double p;
    double E_f;
};

/// A-priori beta for the alpha_* regularization:
///   0 <= p < 2: tau (delta/E_f)^{2/(p+2)},
///   2 <= p < 4: tau (delta/E_f)^{1/2},
///   p >= 4:     tau (delta/E_f)^{1/2} / sqrt(tau + 1).
double a_priori_beta(double p, double delta, double E_f, double tau);

}  // namespace isp

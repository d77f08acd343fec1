#pragma once

#include "isp/grid.hpp"
#include "isp/timedisc.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace isp {

/// Time profile q(t) multiplying the source; an empty function means q = 1.
using TimeFunction = std::function<double(double)>;

/// Crank-Nicolson forward heat solve u_t = Delta_h u + q(t) f, u(0) = phi,
/// with the trapezoidal average of q on each step. Returns u^n.
Vector crank_nicolson_forward(const Vector& f, const TimeFunction& q, const Vector& phi,
                              const SpatialGrid& grid, const TimeGrid& timegrid);

/// Backward-Euler trajectory (u^j - u^{j-1})/tau - Delta_h u^j = q_j f for
/// j = 1..n, returned as the columns of a dof x n matrix. q holds q(t_j),
/// j = 1..n; empty means all ones.
Matrix backward_euler_forward(const Vector& f, const std::vector<double>& q, const Vector& phi,
                              const SpatialGrid& grid, const TimeGrid& timegrid);

struct NoisyData {
    Vector g_delta;
    /// Discrete L2 norm of g_delta - g.
    double delta = 0.0;
};

/// g_delta_i = g_i (1 + epsilon U_i) with U_i uniform on [-1, 1).
///
/// The stream is std::mt19937_64 seeded with `seed`; each 64-bit output x is
/// mapped to U = 2 (x >> 11) 2^-53 - 1, so the sequence is reproducible across
/// platforms and standard libraries.
NoisyData add_noise(const SpatialGrid& grid, const Vector& g, double epsilon, std::uint64_t seed);

/// Exact source, clean and noisy final data for one synthetic experiment.
struct SyntheticCase {
    Vector f_exact;
    std::vector<double> q;
    Vector phi;
    Vector g_clean;
    Vector g_delta;
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
};

/// Generates g by Crank-Nicolson on the same grids and adds noise. q is
/// sampled at t_j, j = 1..n, for use by the inverse solvers.
SyntheticCase make_synthetic_case(const SpatialGrid& grid, const TimeGrid& timegrid,
                                  const SpaceFunction& f, const TimeFunction& q, const Vector& phi,
                                  double epsilon, std::uint64_t seed);

}  // namespace isp

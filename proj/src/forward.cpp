#include "isp/forward.hpp"

#include "isp/errors.hpp"

#include <random>

namespace isp {

namespace {

void check_field(const SpatialGrid& grid, const Vector& v, const char* what) {
    if (v.size() != grid.dof()) throw InvalidArgument(std::string(what) + " has wrong length");
}

}  // namespace

Vector crank_nicolson_forward(const Vector& f, const TimeFunction& q, const Vector& phi,
                              const SpatialGrid& grid, const TimeGrid& timegrid) {
    check_field(grid, f, "crank_nicolson_forward: f");
    check_field(grid, phi, "crank_nicolson_forward: phi");
    const DirichletLaplacian lap(grid);
    const double tau = timegrid.tau();
    const double d = 2.0 / tau;
    auto q_at = [&](int j) { return q ? q(timegrid.time(j)) : 1.0; };

    // (2/tau - Delta_h) u^{j+1} = (2/tau + Delta_h) u^j + (q_j + q_{j+1}) f
    Vector u = phi;
    double q_prev = q_at(0);
    for (int j = 0; j < timegrid.n(); ++j) {
        const double q_next = q_at(j + 1);
        const Vector rhs = d * u + lap.apply(u) + (q_prev + q_next) * f;
        u = lap.shifted_solve(d, rhs);
        q_prev = q_next;
    }
    return u;
}

Matrix backward_euler_forward(const Vector& f, const std::vector<double>& q, const Vector& phi,
                              const SpatialGrid& grid, const TimeGrid& timegrid) {
    check_field(grid, f, "backward_euler_forward: f");
    check_field(grid, phi, "backward_euler_forward: phi");
    const int n = timegrid.n();
    if (!q.empty() && static_cast<int>(q.size()) != n) {
        throw InvalidArgument("backward_euler_forward: q must have length n");
    }
    const DirichletLaplacian lap(grid);
    const double inv_tau = 1.0 / timegrid.tau();
    Matrix traj(grid.dof(), n);
    Vector u = phi;
    for (int j = 1; j <= n; ++j) {
        const double qj = q.empty() ? 1.0 : q[static_cast<std::size_t>(j - 1)];
        u = lap.shifted_solve(inv_tau, Vector(inv_tau * u + qj * f));
        traj.col(j - 1) = u;
    }
    return traj;
}

NoisyData add_noise(const SpatialGrid& grid, const Vector& g, double epsilon, std::uint64_t seed) {
    check_field(grid, g, "add_noise: g");
    if (!(epsilon >= 0.0)) throw InvalidArgument("add_noise: epsilon must be >= 0");
    std::mt19937_64 rng(seed);
    constexpr double unit = 0x1.0p-53;
    NoisyData out;
    out.g_delta.resize(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double u = 2.0 * static_cast<double>(rng() >> 11) * unit - 1.0;
        out.g_delta[i] = g[i] * (1.0 + epsilon * u);
    }
    out.delta = l2_norm(grid, Vector(out.g_delta - g));
    return out;
}

SyntheticCase make_synthetic_case(const SpatialGrid& grid, const TimeGrid& timegrid,
                                  const SpaceFunction& f, const TimeFunction& q, const Vector& phi,
                                  double epsilon, std::uint64_t seed) {
    SyntheticCase out;
    out.f_exact = grid.sample(f);
    out.q = q ? sample_time_source(timegrid, q) : std::vector<double>(static_cast<std::size_t>(timegrid.n()), 1.0);
    out.phi = phi;
    out.g_clean = crank_nicolson_forward(out.f_exact, q, phi, grid, timegrid);
    NoisyData noisy = add_noise(grid, out.g_clean, epsilon, seed);
    out.g_delta = std::move(noisy.g_delta);
    out.delta = noisy.delta;
    out.epsilon = epsilon;
    out.seed = seed;
    return out;
}

}  // namespace isp

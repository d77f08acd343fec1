#pragma once

#include "isp/grid.hpp"
#include "isp/roots.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace isp {

/// Uniform backward-Euler time grid t_j = j*tau, tau = T/n.
class TimeGrid {
public:
    TimeGrid(double T, int n);

    double T() const { return T_; }
    int n() const { return n_; }
    double tau() const { return tau_; }
    double time(int j) const { return j * tau_; }

private:
    double T_;
    int n_;
    double tau_;
};

enum class Method { qbvm, mqbvm, pqbvm };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// Quasi-boundary regularization: method, regularization parameter beta and
/// design parameter alpha.
struct RegularizationSpec {
    Method method;
    double beta;
    double alpha;

    static RegularizationSpec qbvm(double beta);
    /// alpha = 0.
    static RegularizationSpec mqbvm(double beta);
    /// alpha = 1/tau + tau/beta, the choice that makes B provably diagonalizable.
    static RegularizationSpec pqbvm(double beta, const TimeGrid& timegrid);

    /// c = beta / tau^2.
    double c(const TimeGrid& timegrid) const;
    static double alpha_star(double beta, const TimeGrid& timegrid);
    bool uses_alpha_star(const TimeGrid& timegrid) const;
};

/// Samples q(t_j) for j = 1..n.
std::vector<double> sample_time_source(const TimeGrid& timegrid,
                                       const std::function<double(double)>& q);

/// The (n+1)x(n+1) time discretization matrix B (or B_q for non-unit q):
/// row 0 = [alpha, 0, ..., 0, 1/beta]; row j >= 1 has -q_j in column 0,
/// 1/tau on the diagonal and -1/tau in column j-1 when j >= 2.
class TimeMatrix {
public:
    TimeMatrix(const TimeGrid& timegrid, const RegularizationSpec& spec, std::vector<double> q);

    const TimeGrid& timegrid() const { return timegrid_; }
    const RegularizationSpec& spec() const { return spec_; }
    const std::vector<double>& q() const { return q_; }
    bool unit_q() const { return unit_q_; }
    int size() const { return timegrid_.n() + 1; }

    Matrix dense() const;

private:
    TimeGrid timegrid_;
    RegularizationSpec spec_;
    std::vector<double> q_;
    bool unit_q_;
};

/// Builds B; q empty means q_j = 1. Rejects n < 2 and QBVM (no Kronecker form).
TimeMatrix build_time_matrix(const TimeGrid& timegrid, const RegularizationSpec& spec,
                             std::vector<double> q = {});

/// psi(mu) = (mu - 1) p(mu) for unit q, normalized so its leading coefficient is 1.
/// For alpha = alpha_* this is mu^{n+2} + (c-1) mu - c.
Polynomial psi_polynomial(const TimeGrid& timegrid, const RegularizationSpec& spec);

/// Polynomial of degree n+1 whose roots mu_k give the eigenvalues
/// lambda_k = (1 - 1/mu_k)/tau of B. For unit q and alpha = alpha_* it is
/// c + mu + ... + mu^{n+1}. For unit q and general alpha it is obtained by
/// deflating psi_polynomial by mu = 1 (DeflationFailure if the remainder is
/// not negligible); for general q it is assembled directly.
Polynomial characteristic_polynomial(const TimeGrid& timegrid, const RegularizationSpec& spec,
                                     const std::vector<double>& q = {});

enum class EigenSource { polynomial_roots, dense_eigensolver };
enum class InverseMethod { closed_form, linear_solve };

std::string_view to_string(InverseMethod method);

struct Diagonalization {
    CVector mu;
    CVector lambda;
    CMatrix V;
    CMatrix W;
    double kappa1 = 0.0;
    EigenSource eigen_source = EigenSource::polynomial_roots;
    InverseMethod w_method = InverseMethod::linear_solve;
    /// Unit q, alpha = alpha_* and c > 1: distinct eigenvalues are guaranteed.
    bool guaranteed = false;
};

struct DiagonalizeOptions {
    /// Allow the closed-form inverse when its hypotheses hold.
    bool closed_form = true;
    /// Force the dense eigensolver instead of the polynomial root finder.
    bool force_dense = false;
};

/// Eigen-decomposition B = V diag(lambda) W with the (mu_k - 1)-scaled
/// eigenvector columns. Falls back from the root finder to a dense eigensolver
/// on NoConvergence. Throws NearDefectiveMatrix when two mu_k lie within
/// 1e-7 max|mu| of each other.
Diagonalization diagonalize(const TimeMatrix& tm, const DiagonalizeOptions& options = {});

/// Eigenvector matrix from given roots mu_k (columns scaled by mu_k - 1).
CMatrix eigenvector_matrix(const TimeMatrix& tm, const CVector& mu);

/// Closed-form V^{-1} for unit q, alpha = alpha_*, c > 1.
CMatrix closed_form_inverse(const CVector& mu, const TimeGrid& timegrid, double c);

/// Lagrange coefficient L_jk = (mu_j^{1-k} - mu_j^{-n-1}) / (n+2+(c-1) mu_j^{-n-1}), 1-based k.
CMatrix lagrange_coefficients(const CVector& mu, double c);

/// Smallest pairwise distance between roots.
double min_root_gap(const CVector& mu);

double norm1(const CMatrix& a);

struct ConditionReport {
    double kappa1 = 0.0;
    double norm1_V = 0.0;
    double norm1_W = 0.0;
    /// Present only when n > 11, alpha = alpha_*, c > 1.
    std::optional<double> bound_V;
    std::optional<double> bound_W;
};

ConditionReport condition_report(const Diagonalization& diag, const RegularizationSpec& spec,
                                 const TimeGrid& timegrid);

}  // namespace isp

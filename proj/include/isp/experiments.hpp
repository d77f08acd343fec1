#pragma once

#include "isp/forward.hpp"
#include "isp/pint.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace isp {

/// One of the five reference problems. All use phi = 0 and T = 1 on (0, pi)^dim.
struct ExampleDefinition {
    int id = 1;
    int dim = 1;
    double T = 1.0;
    SpaceFunction source;
    /// Empty for q = 1.
    TimeFunction q;
    std::string description;
};

/// id in 1..5: smooth, hat, indicator, 2D product, smooth with q(t).
ExampleDefinition example_definition(int id);

enum class BetaRuleKind { method_default, delta_sqrt, delta, tau_delta_sqrt, explicit_value };

struct BetaRule {
    BetaRuleKind kind = BetaRuleKind::method_default;
    double value = 0.0;
};

/// Accepts "default", "delta_sqrt", "delta", "tau_delta_sqrt" and "explicit:<value>".
BetaRule parse_beta_rule(std::string_view text);
std::string to_string(const BetaRule& rule);

/// method_default resolves to delta^{1/2} (QBVM), delta (MQBVM) or tau delta^{1/2} (PQBVM).
double select_beta(const BetaRule& rule, Method method, double delta, double tau);

RegularizationSpec make_spec(Method method, double beta, const TimeGrid& timegrid);

struct ExperimentConfig {
    int example = 1;
    Method method = Method::pqbvm;
    int m = 256;
    int n = 256;
    std::vector<double> epsilons{1e-1, 1e-2, 1e-3, 1e-4};
    std::vector<std::uint64_t> seeds{1};
    BetaRule beta;
    unsigned threads = 1;
    bool relative = false;

    /// Throws InvalidArgument.
    void validate() const;
};

struct RunRow {
    int example = 0;
    int dim = 1;
    Method method = Method::pqbvm;
    int m = 0;
    int n = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::string beta_rule;
    unsigned threads = 1;
    double delta = 0.0;
    double beta = 0.0;
    double alpha = 0.0;
    /// "pint", "allatonce", or "allatonce_fallback" after a PinT escalation.
    std::string solver;
    /// "ok" or "failed: <reason>".
    std::string status;
    double error_L2 = 0.0;
    std::optional<double> relative_error;
    double residual = 0.0;
    double t_diag = 0.0;
    double t_solve = 0.0;
    double t_total = 0.0;

    bool ok() const { return status == "ok"; }
};

/// Sweeps every (epsilon, seed) of the configuration. Failures are recorded
/// per row and never abort the sweep.
std::vector<RunRow> run_example(const ExperimentConfig& config);

inline constexpr int csv_schema_version = 1;

void write_run_csv(std::ostream& out, const std::vector<RunRow>& rows);

struct CondRow {
    /// "alpha0" (MQBVM, beta = delta) or "alpha_star" (PQBVM, beta = tau delta^{1/2}).
    std::string alpha_choice;
    int n = 0;
    double delta = 0.0;
    double beta = 0.0;
    double c = 0.0;
    double kappa1 = 0.0;
    double norm1_V = 0.0;
    double norm1_W = 0.0;
    double max_abs_W = 0.0;
    std::optional<double> bound_V;
    /// Entrywise bound on |W_jk|.
    std::optional<double> bound_W;
    /// bound_V (n+1) bound_W, an upper bound for kappa1.
    std::optional<double> analytic_bound;
    std::string eigen_source;
    std::string w_method;
    std::string status;
};

/// Condition numbers of V on T = 1 for every (choice, n, delta).
std::vector<CondRow> cond_study(const std::vector<int>& n_list, const std::vector<double>& delta_list);

void write_cond_csv(std::ostream& out, const std::vector<CondRow>& rows);

struct BenchConfig {
    int example = 1;
    Method method = Method::pqbvm;
    int m = 1024;
    int n = 1024;
    double epsilon = 1e-2;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0 = hardware concurrency
    /// Skip the sparse direct solve when the all-at-once system has more unknowns.
    long long ceiling = 4'000'000;
};

struct BenchRow {
    /// "pint_serial", "pint_parallel" or "sparse_direct".
    std::string path;
    int dim = 1;
    int m = 0;
    int n = 0;
    unsigned threads = 1;
    double seconds = 0.0;
    double residual = 0.0;
    /// Relative L2 gap of f to the sparse direct solution when both ran.
    std::optional<double> gap_to_direct;
    std::string status;
};

std::vector<BenchRow> bench(const BenchConfig& config);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

double median(std::vector<double> values);

}  // namespace isp

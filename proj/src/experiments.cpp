#include "isp/experiments.hpp"

#include "isp/allatonce.hpp"
#include "isp/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

namespace isp {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string sci(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

std::string sci(const std::optional<double>& v) { return v ? sci(*v) : std::string(); }

// Minimal quoting: fields containing a comma or quote are wrapped.
std::string field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

struct Solved {
    Vector f;
    double residual = 0.0;
    double t_diag = 0.0;
    double t_solve = 0.0;
};

Solved solve_direct_source(const InverseProblem& problem) {
    const BlockSparseSystem sys = assemble(problem);
    const DirectSolution sol = solve_direct(sys);
    return {sol.u.head(sys.block_size), sol.residual, 0.0, sol.factor_seconds + sol.solve_seconds};
}

unsigned resolve_threads(unsigned threads) {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

ExampleDefinition example_definition(int id) {
    ExampleDefinition ex;
    ex.id = id;
    switch (id) {
        case 1:
            ex.source = [](double x, double) { return x * (pi - x) * std::sin(4.0 * x); };
            ex.description = "x(pi-x)sin(4x)";
            break;
        case 2:
            ex.source = [](double x, double) { return x <= pi / 2 ? 2.0 * x : 2.0 * (pi - x); };
            ex.description = "hat function";
            break;
        case 3:
            ex.source = [](double x, double) { return (x >= pi / 3 && x <= 2 * pi / 3) ? 1.0 : 0.0; };
            ex.description = "indicator of [pi/3, 2pi/3]";
            break;
        case 4:
            ex.dim = 2;
            ex.source = [](double x, double y) {
                return x * (pi - x) * std::sin(2.0 * x) * y * (pi - y) * std::cos(y);
            };
            ex.description = "x(pi-x)sin(2x) y(pi-y)cos(y)";
            break;
        case 5:
            ex.source = [](double x, double) { return x * (pi - x) * std::sin(4.0 * x); };
            ex.q = [](double t) { return std::exp(-t) + std::log(t + 1.0) + t * t; };
            ex.description = "x(pi-x)sin(4x), q(t) = exp(-t) + log(t+1) + t^2";
            break;
        default:
            throw InvalidArgument("example must be in 1..5");
    }
    return ex;
}

BetaRule parse_beta_rule(std::string_view text) {
    if (text == "default" || text.empty()) return {};
    if (text == "delta_sqrt") return {BetaRuleKind::delta_sqrt, 0.0};
    if (text == "delta") return {BetaRuleKind::delta, 0.0};
    if (text == "tau_delta_sqrt") return {BetaRuleKind::tau_delta_sqrt, 0.0};
    constexpr std::string_view prefix = "explicit:";
    if (text.starts_with(prefix)) {
        const std::string number(text.substr(prefix.size()));
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(number, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != number.size() || number.empty() || !(value > 0.0)) {
            throw InvalidArgument("explicit beta must be a positive number");
        }
        return {BetaRuleKind::explicit_value, value};
    }
    throw InvalidArgument("unknown beta rule '" + std::string(text) + "'");
}

std::string to_string(const BetaRule& rule) {
    switch (rule.kind) {
        case BetaRuleKind::method_default: return "default";
        case BetaRuleKind::delta_sqrt: return "delta_sqrt";
        case BetaRuleKind::delta: return "delta";
        case BetaRuleKind::tau_delta_sqrt: return "tau_delta_sqrt";
        case BetaRuleKind::explicit_value: return "explicit:" + sci(rule.value);
    }
    return "?";
}

double select_beta(const BetaRule& rule, Method method, double delta, double tau) {
    BetaRuleKind kind = rule.kind;
    if (kind == BetaRuleKind::method_default) {
        kind = method == Method::qbvm    ? BetaRuleKind::delta_sqrt
               : method == Method::mqbvm ? BetaRuleKind::delta
                                         : BetaRuleKind::tau_delta_sqrt;
    }
    switch (kind) {
        case BetaRuleKind::delta_sqrt: return std::sqrt(delta);
        case BetaRuleKind::delta: return delta;
        case BetaRuleKind::tau_delta_sqrt: return tau * std::sqrt(delta);
        case BetaRuleKind::explicit_value: return rule.value;
        case BetaRuleKind::method_default: break;
    }
    return nan;
}

RegularizationSpec make_spec(Method method, double beta, const TimeGrid& timegrid) {
    switch (method) {
        case Method::qbvm: return RegularizationSpec::qbvm(beta);
        case Method::mqbvm: return RegularizationSpec::mqbvm(beta);
        case Method::pqbvm: return RegularizationSpec::pqbvm(beta, timegrid);
    }
    throw InvalidArgument("unknown method");
}

void ExperimentConfig::validate() const {
    example_definition(example);
    if (m < 1) throw InvalidArgument("m must be >= 1");
    if (n < 2) throw InvalidArgument("n must be >= 2");
    if (epsilons.empty()) throw InvalidArgument("at least one epsilon is required");
    for (double e : epsilons) {
        if (!(e >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
    }
    if (seeds.empty()) throw InvalidArgument("at least one seed is required");
    if (beta.kind == BetaRuleKind::explicit_value && !(beta.value > 0.0)) {
        throw InvalidArgument("explicit beta must be positive");
    }
}

std::vector<RunRow> run_example(const ExperimentConfig& config) {
    config.validate();
    const ExampleDefinition ex = example_definition(config.example);
    const SpatialGrid grid(ex.dim, config.m);
    const TimeGrid tg(ex.T, config.n);
    const Vector phi = Vector::Zero(grid.dof());
    const Vector f_exact = grid.sample(ex.source);
    const double f_norm = l2_norm(grid, f_exact);
    const Vector g_clean = crank_nicolson_forward(f_exact, ex.q, phi, grid, tg);
    const std::vector<double> q = ex.q ? sample_time_source(tg, ex.q) : std::vector<double>{};
    const DirichletLaplacian lap(grid);

    std::vector<RunRow> rows;
    for (double eps : config.epsilons) {
        for (std::uint64_t seed : config.seeds) {
            RunRow row;
            row.example = config.example;
            row.dim = ex.dim;
            row.method = config.method;
            row.m = config.m;
            row.n = config.n;
            row.epsilon = eps;
            row.seed = seed;
            row.beta_rule = to_string(config.beta);
            row.threads = config.threads;
            row.solver = config.method == Method::qbvm ? "allatonce" : "pint";
            try {
                const NoisyData noisy = add_noise(grid, g_clean, eps, seed);
                row.delta = noisy.delta;
                row.beta = select_beta(config.beta, config.method, noisy.delta, tg.tau());
                if (!(row.beta > 0.0)) throw InvalidArgument("selected beta is not positive (delta = 0?)");
                const InverseProblem problem{grid, tg, make_spec(config.method, row.beta, tg), phi,
                                             noisy.g_delta, q};
                row.alpha = problem.spec.alpha;

                Solved s;
                if (config.method == Method::qbvm) {
                    s = solve_direct_source(problem);
                } else {
                    try {
                        const auto start = Clock::now();
                        const TimeMatrix tm = build_time_matrix(tg, problem.spec, problem.q_samples());
                        const Diagonalization diag = diagonalize(tm);
                        const double t_diag = seconds_since(start);
                        PintOptions opts;
                        opts.threads = config.threads;
                        const ReconstructionResult r = solve(problem, diag, lap, opts);
                        s = {r.f, r.residual, t_diag,
                             r.timings.step_a + r.timings.step_b + r.timings.step_c};
                    } catch (const SingularShift&) {
                        s = solve_direct_source(problem);
                        row.solver = "allatonce_fallback";
                    } catch (const NearDefectiveMatrix&) {
                        s = solve_direct_source(problem);
                        row.solver = "allatonce_fallback";
                    } catch (const NonRealReconstruction&) {
                        s = solve_direct_source(problem);
                        row.solver = "allatonce_fallback";
                    }
                }
                row.error_L2 = l2_norm(grid, Vector(s.f - f_exact));
                if (config.relative) row.relative_error = f_norm > 0.0 ? row.error_L2 / f_norm : nan;
                row.residual = s.residual;
                row.t_diag = s.t_diag;
                row.t_solve = s.t_solve;
                row.t_total = s.t_diag + s.t_solve;
                row.status = "ok";
            } catch (const std::exception& e) {
                row.status = std::string("failed: ") + e.what();
                row.error_L2 = row.residual = row.t_diag = row.t_solve = row.t_total = nan;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_run_csv(std::ostream& out, const std::vector<RunRow>& rows) {
    out << "schema_version,example,dim,method,m,n,epsilon,seed,beta_rule,threads,delta,beta,alpha,"
           "solver,status,error_L2,relative_error,residual,t_diag,t_solve,t_total\n";
    for (const RunRow& r : rows) {
        out << csv_schema_version << ',' << r.example << ',' << r.dim << ',' << to_string(r.method) << ','
            << r.m << ',' << r.n << ',' << sci(r.epsilon) << ',' << r.seed << ',' << field(r.beta_rule) << ','
            << r.threads << ',' << sci(r.delta) << ',' << sci(r.beta) << ',' << sci(r.alpha) << ','
            << r.solver << ',' << field(r.status) << ',' << sci(r.error_L2) << ',' << sci(r.relative_error)
            << ',' << sci(r.residual) << ',' << sci(r.t_diag) << ',' << sci(r.t_solve) << ','
            << sci(r.t_total) << '\n';
    }
}

std::vector<CondRow> cond_study(const std::vector<int>& n_list, const std::vector<double>& delta_list) {
    std::vector<CondRow> rows;
    for (const char* choice : {"alpha0", "alpha_star"}) {
        const bool star = std::string_view(choice) == "alpha_star";
        for (int n : n_list) {
            for (double delta : delta_list) {
                CondRow row;
                row.alpha_choice = choice;
                row.n = n;
                row.delta = delta;
                try {
                    if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
                    const TimeGrid tg(1.0, n);
                    row.beta = star ? tg.tau() * std::sqrt(delta) : delta;
                    const RegularizationSpec spec = star ? RegularizationSpec::pqbvm(row.beta, tg)
                                                         : RegularizationSpec::mqbvm(row.beta);
                    row.c = spec.c(tg);
                    const Diagonalization diag = diagonalize(build_time_matrix(tg, spec));
                    const ConditionReport rep = condition_report(diag, spec, tg);
                    row.kappa1 = rep.kappa1;
                    row.norm1_V = rep.norm1_V;
                    row.norm1_W = rep.norm1_W;
                    row.max_abs_W = diag.W.cwiseAbs().maxCoeff();
                    row.bound_V = rep.bound_V;
                    row.bound_W = rep.bound_W;
                    if (rep.bound_V && rep.bound_W) row.analytic_bound = *rep.bound_V * (n + 1) * *rep.bound_W;
                    row.eigen_source = diag.eigen_source == EigenSource::polynomial_roots ? "roots" : "dense";
                    row.w_method = std::string(to_string(diag.w_method));
                    row.status = "ok";
                } catch (const NearDefectiveMatrix& e) {
                    row.status = std::string("near_defective: ") + e.what();
                    row.kappa1 = nan;
                } catch (const std::exception& e) {
                    row.status = std::string("failed: ") + e.what();
                    row.kappa1 = nan;
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_cond_csv(std::ostream& out, const std::vector<CondRow>& rows) {
    out << "schema_version,alpha_choice,n,delta,beta,c,kappa1,norm1_V,norm1_W,max_abs_W,bound_V,bound_W,"
           "analytic_bound,eigen_source,w_method,status\n";
    for (const CondRow& r : rows) {
        out << csv_schema_version << ',' << r.alpha_choice << ',' << r.n << ',' << sci(r.delta) << ','
            << sci(r.beta) << ',' << sci(r.c) << ',' << sci(r.kappa1) << ',' << sci(r.norm1_V) << ','
            << sci(r.norm1_W) << ',' << sci(r.max_abs_W) << ',' << sci(r.bound_V) << ',' << sci(r.bound_W)
            << ',' << sci(r.analytic_bound) << ',' << r.eigen_source << ',' << r.w_method << ','
            << field(r.status) << '\n';
    }
}

std::vector<BenchRow> bench(const BenchConfig& config) {
    const ExampleDefinition ex = example_definition(config.example);
    if (config.m < 1 || config.n < 2) throw InvalidArgument("bench: need m >= 1 and n >= 2");
    const SpatialGrid grid(ex.dim, config.m);
    const TimeGrid tg(ex.T, config.n);
    const Vector phi = Vector::Zero(grid.dof());
    const SyntheticCase data = make_synthetic_case(grid, tg, ex.source, ex.q, phi, config.epsilon, config.seed);
    const double beta = select_beta({}, config.method, data.delta, tg.tau());
    const InverseProblem problem{grid, tg, make_spec(config.method, beta, tg), phi, data.g_delta,
                                 ex.q ? data.q : std::vector<double>{}};

    auto base = [&](std::string path, unsigned threads) {
        BenchRow row;
        row.path = std::move(path);
        row.dim = ex.dim;
        row.m = config.m;
        row.n = config.n;
        row.threads = threads;
        row.seconds = row.residual = nan;
        return row;
    };

    std::vector<BenchRow> rows;
    std::optional<Vector> direct_f;
    const long long unknowns = static_cast<long long>(grid.dof()) * (config.n + 1);
    {
        BenchRow row = base("sparse_direct", 1);
        if (unknowns > config.ceiling) {
            row.status = "skipped";
        } else {
            try {
                const auto start = Clock::now();
                const BlockSparseSystem sys = assemble(problem);
                const DirectSolution sol = solve_direct(sys);
                row.seconds = seconds_since(start);
                row.residual = sol.residual;
                direct_f = sol.u.head(sys.block_size);
                row.status = "ok";
            } catch (const std::exception& e) {
                row.status = std::string("failed: ") + e.what();
            }
        }
        rows.push_back(std::move(row));
    }

    const unsigned parallel = resolve_threads(config.threads);
    for (auto [path, threads] : {std::pair<const char*, unsigned>{"pint_serial", 1u}, {"pint_parallel", parallel}}) {
        BenchRow row = base(path, threads);
        if (config.method == Method::qbvm) {
            row.status = "skipped";
            rows.push_back(std::move(row));
            continue;
        }
        try {
            PintOptions opts;
            opts.threads = threads;
            const auto start = Clock::now();
            const ReconstructionResult r = solve(problem, opts);
            row.seconds = seconds_since(start);
            row.residual = r.residual;
            if (direct_f) row.gap_to_direct = (r.f - *direct_f).norm() / direct_f->norm();
            row.status = "ok";
        } catch (const std::exception& e) {
            row.status = std::string("failed: ") + e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "schema_version,path,dim,m,n,threads,seconds,residual,gap_to_direct,status\n";
    for (const BenchRow& r : rows) {
        out << csv_schema_version << ',' << r.path << ',' << r.dim << ',' << r.m << ',' << r.n << ','
            << r.threads << ',' << sci(r.seconds) << ',' << sci(r.residual) << ',' << sci(r.gap_to_direct)
            << ',' << field(r.status) << '\n';
    }
}

double median(std::vector<double> values) {
    if (values.empty()) return nan;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace isp

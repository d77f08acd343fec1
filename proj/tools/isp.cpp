// isp: experiment runner for the heat-source reconstruction solvers.
//
//   isp run   --example N --method M --m M --n N --eps LIST --seeds LIST --out FILE
//   isp cond  --n LIST --delta LIST --out FILE
//   isp bench --example N --m M --n N [--ceiling DOF] --out FILE
//
// Every subcommand also accepts --config FILE with key=value lines naming the
// long options; options given on the command line take precedence.
// Exit codes: 0 success, 2 configuration error, 3 every row failed.

#include "isp/errors.hpp"
#include "isp/experiments.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

namespace {

constexpr int exit_config = 2;
constexpr int exit_solver = 3;

struct Options {
    std::string config;
    std::string out;

    int example = 1;
    std::string method = "pqbvm";
    int m = 256;
    int n = 256;
    std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
    std::vector<std::uint64_t> seeds{1};
    std::string beta = "default";
    unsigned threads = 1;
    bool relative = false;

    std::vector<int> n_list{16, 32, 64, 128, 256, 512};
    std::vector<double> delta_list{1e-2, 1e-4, 1e-6};

    double bench_eps = 1e-2;
    unsigned bench_threads = 0;
    long long ceiling = 4'000'000;
};

struct Cli {
    std::unique_ptr<CLI::App> app;
    CLI::App* run = nullptr;
    CLI::App* cond = nullptr;
    CLI::App* bench = nullptr;
};

Cli build(Options& o) {
    Cli cli;
    cli.app = std::make_unique<CLI::App>("Heat-source reconstruction experiments");
    cli.app->require_subcommand(1);

    cli.run = cli.app->add_subcommand("run", "Reconstruct a reference example over noise levels and seeds");
    cli.run->add_option("--config", o.config, "key=value file");
    cli.run->add_option("--example", o.example, "Example 1..5")->check(CLI::Range(1, 5));
    cli.run->add_option("--method", o.method, "qbvm, mqbvm or pqbvm")
        ->check(CLI::IsMember({"qbvm", "mqbvm", "pqbvm"}));
    cli.run->add_option("--m", o.m, "Interior nodes per axis")->check(CLI::PositiveNumber);
    cli.run->add_option("--n", o.n, "Time steps")->check(CLI::Range(2, 1 << 20));
    cli.run->add_option("--eps", o.eps, "Relative noise levels")->delimiter(',');
    cli.run->add_option("--seeds", o.seeds, "Noise seeds")->delimiter(',');
    cli.run->add_option("--beta", o.beta, "default, delta_sqrt, delta, tau_delta_sqrt or explicit:VALUE");
    cli.run->add_option("--threads", o.threads, "Worker threads for the PinT solver")->check(CLI::PositiveNumber);
    cli.run->add_flag("--relative", o.relative, "Also report error relative to ||f||");
    cli.run->add_option("--out", o.out, "Output CSV ('-' for stdout)");

    cli.cond = cli.app->add_subcommand("cond", "Condition number study of the eigenvector matrix");
    cli.cond->add_option("--config", o.config, "key=value file");
    cli.cond->add_option("--n", o.n_list, "Time step counts")->delimiter(',');
    cli.cond->add_option("--delta", o.delta_list, "Noise levels")->delimiter(',');
    cli.cond->add_option("--out", o.out, "Output CSV ('-' for stdout)");

    cli.bench = cli.app->add_subcommand("bench", "PinT versus sparse direct timing");
    cli.bench->add_option("--config", o.config, "key=value file");
    cli.bench->add_option("--example", o.example, "Example 1..5")->check(CLI::Range(1, 5));
    cli.bench->add_option("--method", o.method, "mqbvm or pqbvm")->check(CLI::IsMember({"qbvm", "mqbvm", "pqbvm"}));
    cli.bench->add_option("--m", o.m, "Interior nodes per axis")->check(CLI::PositiveNumber);
    cli.bench->add_option("--n", o.n, "Time steps")->check(CLI::Range(2, 1 << 20));
    cli.bench->add_option("--eps", o.bench_eps, "Relative noise level");
    cli.bench->add_option("--threads", o.bench_threads, "Threads for pint_parallel (0 = all cores)");
    cli.bench->add_option("--ceiling", o.ceiling, "Largest all-at-once system for the sparse direct solve");
    cli.bench->add_option("--out", o.out, "Output CSV ('-' for stdout)");
    return cli;
}

CLI::App* active(const Cli& cli) {
    for (CLI::App* sub : {cli.run, cli.cond, cli.bench}) {
        if (sub->parsed()) return sub;
    }
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Arguments contributed by the config file for options not already given.
std::vector<std::string> config_arguments(const std::string& path, CLI::App& sub) {
    std::ifstream in(path);
    if (!in) throw isp::InvalidArgument("cannot open config file '" + path + "'");
    std::vector<std::string> args;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw isp::InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "config") throw isp::InvalidArgument("config files cannot include other config files");
        CLI::Option* opt = nullptr;
        try {
            opt = sub.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw isp::InvalidArgument(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (opt->count() > 0) continue;
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1" || value == "yes") args.push_back("--" + key);
            continue;
        }
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

void open_output(const std::string& path, std::ofstream& file) {
    if (path.empty()) throw isp::InvalidArgument("--out is required");
    if (path == "-") return;
    file.open(path);
    if (!file) throw isp::InvalidArgument("cannot write '" + path + "'");
}

int run_command(const Options& o, const std::string& name) {
    std::ofstream file;
    open_output(o.out, file);
    std::ostream& out = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;

    if (name == "run") {
        isp::ExperimentConfig cfg;
        cfg.example = o.example;
        cfg.method = isp::parse_method(o.method);
        cfg.m = o.m;
        cfg.n = o.n;
        cfg.epsilons = o.eps;
        cfg.seeds = o.seeds;
        cfg.beta = isp::parse_beta_rule(o.beta);
        cfg.threads = o.threads;
        cfg.relative = o.relative;
        cfg.validate();
        const auto rows = isp::run_example(cfg);
        isp::write_run_csv(out, rows);
        const bool any_ok = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok(); });
        for (const auto& r : rows) {
            if (!r.ok()) std::cerr << "eps=" << r.epsilon << " seed=" << r.seed << ": " << r.status << '\n';
        }
        return any_ok ? 0 : exit_solver;
    }
    if (name == "cond") {
        const auto rows = isp::cond_study(o.n_list, o.delta_list);
        isp::write_cond_csv(out, rows);
        const bool any_ok = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.status == "ok"; });
        return any_ok ? 0 : exit_solver;
    }
    isp::BenchConfig cfg;
    cfg.example = o.example;
    cfg.method = isp::parse_method(o.method);
    cfg.m = o.m;
    cfg.n = o.n;
    cfg.epsilon = o.bench_eps;
    cfg.threads = o.bench_threads;
    cfg.ceiling = o.ceiling;
    const auto rows = isp::bench(cfg);
    isp::write_bench_csv(out, rows);
    const bool any_ok = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.status == "ok"; });
    return any_ok ? 0 : exit_solver;
}

}  // namespace

int main(int argc, char** argv) {
    Options first;
    Cli cli = build(first);
    try {
        cli.app->parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.app->exit(e);
        return code == 0 ? 0 : exit_config;
    }
    CLI::App* sub = active(cli);
    const std::string name = sub->get_name();

    try {
        if (first.config.empty()) return run_command(first, name);

        std::vector<std::string> args{argv[0], name};
        for (auto& a : config_arguments(first.config, *sub)) args.push_back(std::move(a));
        bool after_sub = false;
        for (int i = 1; i < argc; ++i) {
            if (after_sub) args.emplace_back(argv[i]);
            if (!after_sub && name == argv[i]) after_sub = true;
        }
        Options merged;
        Cli second = build(merged);
        std::vector<char*> raw;
        for (auto& a : args) raw.push_back(a.data());
        try {
            second.app->parse(static_cast<int>(raw.size()), raw.data());
        } catch (const CLI::ParseError& e) {
            const int code = second.app->exit(e);
            return code == 0 ? 0 : exit_config;
        }
        return run_command(merged, name);
    } catch (const isp::InvalidArgument& e) {
        std::cerr << "isp: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "isp: " << e.what() << '\n';
        return exit_solver;
    }
}

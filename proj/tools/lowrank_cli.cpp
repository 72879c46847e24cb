// Command-line front end: single-problem solves and the Monte Carlo experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lowrank/baselines.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/experiments.hpp"
#include "lowrank/hankel_lar.hpp"
#include "lowrank/report.hpp"
#include "lowrank/text_io.hpp"
#include "lowrank/unstructured_lar.hpp"

using namespace lowrank;

namespace {

struct GridArg {
    double lo = 0, hi = 0;
    int count = 0;
};

GridArg parse_grid(const std::string& s) {
    GridArg g;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.count, &tail) != 3) {
        throw ConfigError("--lambda-grid expects lo:hi:count, got '" + s + "'");
    }
    if (!(g.lo > 0) || !(g.hi >= g.lo) || g.count < 1) {
        throw ConfigError("--lambda-grid needs 0 < lo <= hi and count >= 1");
    }
    return g;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Expands `--config FILE` into flags. Lines are `key = value` (or a bare `key`
/// for switches); '#' starts a comment. Expanded flags go before any explicit
/// option so the command line wins.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::size_t at = args.size();
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            at = i;
            break;
        }
    }
    if (at == args.size()) return args;
    if (at + 1 >= args.size()) throw ConfigError("--config needs a file name");
    const std::string path = args[at + 1];
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(at), args.begin() + static_cast<std::ptrdiff_t>(at) + 2);

    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file '" + path + "'");
    std::vector<std::string> extra;
    std::string line;
    const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(f, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config file: missing key in '" + line + "'");
        if (eq == std::string::npos) {
            extra.push_back("--" + key);
            continue;
        }
        const std::string value = trim(line.substr(eq + 1));
        if (value == "true" || value == "on") {
            extra.push_back("--" + key);
        } else if (value == "false" || value == "off") {
            extra.push_back("--no-" + key);
        } else {
            extra.push_back("--" + key);
            extra.push_back(value);
        }
    }
    std::size_t first_opt = 1;
    while (first_opt < args.size() && args[first_opt].rfind("-", 0) != 0) ++first_opt;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(first_opt), extra.begin(), extra.end());
    return args;
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw IoError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

struct UnstructuredArgs {
    std::string input, phi, method = "lar", grid = "0.01:0.1:20", output;
    int rank = 1;
    bool normalized = false;
    double rank_tol = kDefaultRankTol;
};

void run_unstructured(const UnstructuredArgs& a) {
    const Matrix Y = read_matrix_file(a.input);
    const Matrix Phi = a.phi.empty() ? Matrix::Identity(Y.rows(), Y.rows()) : read_matrix_file(a.phi);
    if (Phi.rows() != Y.rows()) throw DimensionError("Y and Phi must have the same number of rows");
    Matrix est;
    std::string info;
    if (a.method == "lar") {
        est = lar_estimate(build_path(Y, Phi), a.rank);
    } else if (a.method == "lstsvd") {
        est = ls_tsvd(Y, Phi, a.rank);
    } else {
        const GridArg g = parse_grid(a.grid);
        Matrix warm;
        ProxOptions po;
        const auto hit = lambda_rank_search(
            LambdaGrid::logspace(g.lo, g.hi, g.count, a.rank),
            [&](double lambda) {
                po.lambda = lambda;
                ProxResult r = nuclear_prox_solve(Y, Phi, po, a.normalized, warm.size() ? &warm : nullptr);
                if (!r.converged) std::cerr << "warning: proximal solver did not converge at lambda " << lambda << '\n';
                warm = r.estimate;
                return r.estimate;
            },
            a.rank_tol);
        if (!hit) throw SearchFailure("no rank-" + std::to_string(a.rank) + " solution on the lambda grid");
        est = hit->result;
        info = "# lambda " + format_double(hit->lambda) + "\n";
    }
    Output out(a.output);
    out.stream() << "# method " << a.method << ", rank " << numerical_rank(est, a.rank_tol) << '\n' << info;
    write_matrix(out.stream(), est);
}

struct HankelArgs {
    std::string input, method = "lar", grid = "0.1:1:20", output;
    int rows = 0, rank = 1;
    bool stable = false;
    double eps = 0.01, rank_tol = kDefaultRankTol;
};

void run_hankel(const HankelArgs& a) {
    const Sequence seq = read_sequence_file(a.input);
    const HankelSpec spec = HankelSpec::from_length(seq.size(), a.rows);
    const Matrix Y = hankel_map(seq, spec);
    const Matrix I = Matrix::Identity(spec.rows, spec.rows);
    Sequence est;
    std::ostringstream info;
    if (a.method == "lar" || a.method == "lar-ls") {
        HankelSolverOptions ho;
        ho.rank_budget = a.rank;
        ho.stable = a.stable;
        ho.separation = a.eps;
        const HankelRegression problem(Y, I, spec);
        const HankelLarResult path = run_path(problem, ho);
        std::vector<PoleAtom> atoms = path.active.atoms;
        std::vector<double> coeffs = path.active.coefficients;
        if (a.method == "lar-ls") {
            const Vector c = debias(problem, atoms);
            coeffs.assign(c.data(), c.data() + c.size());
        }
        est = synthesize(atoms, coeffs, spec).sequence;
        canonicalize(atoms, coeffs);
        info << "# achieved rank " << path.achieved_rank << "\n# atom modulus angle phase coefficient\n";
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            info << "# atom " << format_double(atoms[i].modulus) << ' ' << format_double(atoms[i].angle) << ' '
                 << format_double(atoms[i].phase) << ' ' << format_double(coeffs[i]) << '\n';
        }
    } else if (a.method == "nuclear") {
        const GridArg g = parse_grid(a.grid);
        HankelNuclearSolver solver(Y, I, spec);
        solver.set_warm_start(true);
        HankelNuclearOptions ho;
        const auto hit = lambda_rank_search(
            LambdaGrid::logspace(g.lo, g.hi, g.count, a.rank),
            [&](double lambda) {
                ho.lambda = lambda;
                HankelNuclearResult r = solver.solve(ho);
                if (!r.converged) std::cerr << "warning: splitting solver did not converge at lambda " << lambda << '\n';
                return r;
            },
            [&](const HankelNuclearResult& r) { return numerical_rank(r.low_rank, a.rank_tol); });
        if (!hit) throw SearchFailure("no rank-" + std::to_string(a.rank) + " solution on the lambda grid");
        est = hit->result.sequence;
        info << "# lambda " << format_double(hit->lambda) << '\n';
    } else {
        const CadzowResult c = cadzow(Y, a.rank);
        if (!c.converged) std::cerr << "warning: cadzow did not converge\n";
        est = c.sequence;
        info << "# iterations " << c.iterations << '\n';
    }
    Output out(a.output);
    out.stream() << "# method " << a.method << '\n' << info.str();
    write_sequence(out.stream(), est);
}

struct ExperimentArgs {
    std::string out, methods, grid;
    int trials = 120;
    std::uint64_t seed = 0;
    double rank_tol = kDefaultRankTol;
    bool quiet = false;
};

MonteCarloOptions experiment_options(const ExperimentArgs& e, MonteCarloOptions o) {
    o.trials = e.trials;
    o.seed = e.seed;
    o.rank_tol = e.rank_tol;
    if (!e.methods.empty()) o.methods = split_list(e.methods);
    if (!e.grid.empty()) {
        const GridArg g = parse_grid(e.grid);
        o.lambda_lo = g.lo;
        o.lambda_hi = g.hi;
        o.lambda_count = g.count;
    }
    return o;
}

void finish_experiment(const ExperimentArgs& e, const MonteCarloResult& res) {
    if (!e.out.empty()) write_report(e.out, res);
    if (!e.quiet) std::cout << summary_table(res.summary);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank matrix regression by least-angle paths"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    std::string config_note;
    app.add_option("--config", config_note, "key = value file mirroring the flags (applied before the command line)");

    UnstructuredArgs ua;
    auto* un = app.add_subcommand("unstructured", "Rank-r estimate of X from Y = Phi X + E");
    un->add_option("--input", ua.input, "Measurement matrix Y")->required()->check(CLI::ExistingFile);
    un->add_option("--phi", ua.phi, "Regressor Phi (identity when omitted)")->check(CLI::ExistingFile);
    un->add_option("--rank", ua.rank, "Target rank")->required()->check(CLI::PositiveNumber);
    un->add_option("--method", ua.method, "lar | nuclear | lstsvd")
        ->capture_default_str()
        ->check(CLI::IsMember({"lar", "nuclear", "lstsvd"}));
    un->add_option("--lambda-grid", ua.grid, "Nuclear lambda grid lo:hi:count (log spaced)")->capture_default_str();
    un->add_flag("--normalized,!--no-normalized", ua.normalized, "Weight the nuclear norm by S_phi V_phi^T");
    un->add_option("--rank-tol", ua.rank_tol, "Relative singular-value threshold for rank")->capture_default_str();
    un->add_option("--output", ua.output, "Write the estimate here instead of stdout");

    HankelArgs ha;
    auto* hk = app.add_subcommand("hankel", "Rank-r Hankel estimate from a noisy sequence");
    hk->add_option("--input", ha.input, "Sequence of length rows + cols - 1")->required()->check(CLI::ExistingFile);
    hk->add_option("--rows", ha.rows, "Hankel rows M")->required()->check(CLI::PositiveNumber);
    hk->add_option("--rank", ha.rank, "Target rank")->required()->check(CLI::PositiveNumber);
    hk->add_option("--method", ha.method, "lar | lar-ls | nuclear | cadzow")
        ->capture_default_str()
        ->check(CLI::IsMember({"lar", "lar-ls", "nuclear", "cadzow"}));
    hk->add_flag("--stable,!--no-stable", ha.stable, "Restrict poles to |z| <= 1");
    hk->add_option("--eps", ha.eps, "Minimum pole separation")->capture_default_str()->check(CLI::PositiveNumber);
    hk->add_option("--lambda-grid", ha.grid, "Nuclear lambda grid lo:hi:count (log spaced)")->capture_default_str();
    hk->add_option("--rank-tol", ha.rank_tol, "Relative singular-value threshold for rank")->capture_default_str();
    hk->add_option("--output", ha.output, "Write the estimated sequence here instead of stdout");

    auto* ex = app.add_subcommand("experiment", "Monte Carlo comparisons");
    ex->require_subcommand(1);
    const auto common = [](CLI::App* c, ExperimentArgs& e) {
        c->add_option("--trials", e.trials, "Monte Carlo trials")->capture_default_str()->check(CLI::PositiveNumber);
        c->add_option("--seed", e.seed, "Master seed")->capture_default_str();
        c->add_option("--out", e.out, "Directory for trials.csv, summary.json, summary.txt");
        c->add_option("--methods", e.methods, "Comma-separated subset of methods");
        c->add_option("--lambda-grid", e.grid, "Nuclear lambda grid lo:hi:count");
        c->add_option("--rank-tol", e.rank_tol, "Relative singular-value threshold for rank")->capture_default_str();
        c->add_flag("--quiet,!--no-quiet", e.quiet, "Do not print the summary table");
    };

    VarConfig vc;
    ExperimentArgs ve;
    auto* var = ex->add_subcommand("var", "Low-rank vector autoregression (unstructured)");
    var->add_option("--n", vc.n, "State dimension")->capture_default_str();
    var->add_option("--p", vc.p, "Samples")->capture_default_str();
    var->add_option("--rank", vc.rank, "Rank of the transition matrix")->capture_default_str();
    var->add_option("--rho", vc.spectral_radius, "Spectral radius")->capture_default_str();
    var->add_option("--noise", vc.noise, "Noise std")->capture_default_str();
    common(var, ve);

    RealizationConfig rc;
    ExperimentArgs re;
    bool r_stable = true;
    double r_eps = 0.01;
    auto* real = ex->add_subcommand("realization", "Sixth-order impulse-response realization (Hankel)");
    real->add_option("--m", rc.rows, "Hankel rows")->capture_default_str();
    real->add_option("--cols", rc.cols, "Hankel columns")->capture_default_str();
    real->add_option("--noise", rc.noise, "Noise std")->capture_default_str();
    real->add_flag("--stable,!--no-stable", r_stable, "Restrict LAR poles to |z| <= 1")->capture_default_str();
    real->add_option("--eps", r_eps, "Minimum pole separation")->capture_default_str();
    common(real, re);

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(args);
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*un) {
            run_unstructured(ua);
        } else if (*hk) {
            if (ha.rows < 1) throw ConfigError("--rows must be positive");
            run_hankel(ha);
        } else if (*var) {
            const MonteCarloResult res = run_var_experiment(vc, experiment_options(ve, var_defaults()));
            finish_experiment(ve, res);
        } else if (*real) {
            MonteCarloOptions o = experiment_options(re, realization_defaults());
            o.hankel.stable = r_stable;
            o.hankel.separation = r_eps;
            const MonteCarloResult res = run_realization_experiment(rc, o);
            finish_experiment(re, res);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

#include "lowrank/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include "lowrank/errors.hpp"
#include "lowrank/unstructured_lar.hpp"

namespace lowrank {

namespace {

Matrix standard_normal(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix M(rows, cols);
    // Row-major fill keeps the draw order independent of Eigen's storage order.
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) M(i, j) = scale * nd(rng);
    }
    return M;
}

double spectral_radius(const Matrix& M) {
    Eigen::EigenSolver<Matrix> es(M, false);
    if (es.info() != Eigen::Success) throw NumericalError("spectral_radius: eigenvalue solver failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <class F>
TrialResult timed(const std::string& method, F&& body, bool record_time) {
    TrialResult r;
    r.method = method;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = 0.0;
        r.note = e.what();
        r.atoms.clear();
        r.coefficients.clear();
    }
    if (record_time) {
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return r;
}

double squared_error(const Matrix& estimate, const Matrix& truth) {
    const Matrix d = estimate - truth;
    return frob_inner(d, d);
}

LambdaGrid grid_of(const MonteCarloOptions& opts, int rank) {
    return LambdaGrid::logspace(opts.lambda_lo, opts.lambda_hi, opts.lambda_count, rank);
}

void check_methods(const MonteCarloOptions& opts, const std::vector<std::string>& known) {
    if (opts.trials < 1) throw ConfigError("trial count must be >= 1");
    if (opts.methods.empty()) throw ConfigError("at least one method is required");
    for (const std::string& m : opts.methods) {
        if (std::find(known.begin(), known.end(), m) == known.end()) {
            throw ConfigError("unknown method '" + m + "'");
        }
    }
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t substream(std::uint64_t master, std::string_view name, std::uint64_t index) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(master ^ h) + index);
}

void VarConfig::validate() const {
    if (n < 2) throw ConfigError("var: n must be >= 2");
    if (p < n) throw ConfigError("var: p must be >= n");
    if (rank < 1 || rank >= n) throw ConfigError("var: rank must satisfy 1 <= r < n");
    if (!(spectral_radius > 0 && spectral_radius < 1)) throw ConfigError("var: spectral radius must lie in (0, 1)");
    if (!(noise >= 0)) throw ConfigError("var: noise std must be >= 0");
}

VarData gen_var(const VarConfig& cfg) {
    cfg.validate();
    VarData out;
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt > 100) throw NumericalError("gen_var: could not draw a transition matrix with nonzero spectral radius");
        std::mt19937_64 rng(substream(cfg.seed, "data", attempt));
        const Matrix B1 = standard_normal(rng, cfg.n, cfg.rank);
        const Matrix B2 = standard_normal(rng, cfg.n, cfg.rank);
        const Matrix M = B1 * B2.transpose();
        const double sr = spectral_radius(M);
        if (!(sr > 1e-12 * std::max(1.0, M.norm()))) continue;
        out.B = (cfg.spectral_radius / sr) * M;
        break;
    }
    std::mt19937_64 init(substream(cfg.seed, "initial"));
    std::mt19937_64 noise(substream(cfg.seed, "noise"));
    Matrix states(cfg.p + 1, cfg.n);
    states.row(0) = standard_normal(init, 1, cfg.n);
    const Matrix E = standard_normal(noise, cfg.p, cfg.n, cfg.noise);
    for (int k = 0; k < cfg.p; ++k) {
        states.row(k + 1) = states.row(k) * out.B + E.row(k);
    }
    out.Phi = states.topRows(cfg.p);
    out.Y = states.bottomRows(cfg.p);
    return out;
}

void RealizationConfig::validate() const {
    if (rows < 1 || cols < 1) throw ConfigError("realization: Hankel dimensions must be positive");
    if (!(noise >= 0)) throw ConfigError("realization: noise std must be >= 0");
    if (poles.empty() || poles.size() != residues.size()) {
        throw ConfigError("realization: need one residue per pole");
    }
    for (const auto& q : poles) {
        if (!(std::abs(q) < 1.0)) throw ConfigError("realization: poles must lie strictly inside the unit circle");
        if (q.imag() < 0) throw ConfigError("realization: list poles in the upper half plane");
    }
}

double impulse_energy(const std::vector<std::complex<double>>& poles,
                      const std::vector<std::complex<double>>& residues) {
    std::vector<std::complex<double>> alpha, lambda;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        alpha.push_back(residues[i]);
        lambda.push_back(poles[i]);
        alpha.push_back(std::conj(residues[i]));
        lambda.push_back(std::conj(poles[i]));
    }
    std::complex<double> total = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        for (std::size_t l = 0; l < alpha.size(); ++l) {
            total += alpha[j] * alpha[l] / (1.0 - lambda[j] * lambda[l]);
        }
    }
    return total.real();
}

int model_order(const RealizationConfig& cfg) {
    int r = 0;
    for (const auto& q : cfg.poles) r += q.imag() == 0.0 ? 1 : 2;
    return r;
}

RealizationData gen_realization(const RealizationConfig& cfg) {
    cfg.validate();
    const double energy = impulse_energy(cfg.poles, cfg.residues);
    if (!(energy > 0)) throw ConfigError("realization: impulse response has zero energy");
    RealizationData out;
    out.d0 = 1.0 / std::sqrt(energy);
    const Index N = cfg.length();
    out.g = Sequence::Zero(N);
    for (std::size_t i = 0; i < cfg.poles.size(); ++i) {
        const PoleAtom a = make_atom(std::abs(cfg.poles[i]), std::arg(cfg.poles[i]), std::arg(cfg.residues[i]));
        const double c = 2.0 * out.d0 * std::abs(cfg.residues[i]);
        out.atoms.push_back(a);
        out.coefficients.push_back(c);
        out.g += c * atom_sequence(a, N);
    }
    std::mt19937_64 rng(substream(cfg.seed, "noise"));
    out.g_noisy = out.g + standard_normal(rng, N, 1, cfg.noise);
    const HankelSpec spec{cfg.rows, cfg.cols};
    out.Y = hankel_map(out.g_noisy, spec);
    out.X0 = hankel_map(out.g, spec);
    return out;
}

MonteCarloOptions var_defaults() {
    MonteCarloOptions o;
    o.methods = {"lar", "lstsvd", "nuclear"};
    o.lambda_lo = 0.01;
    o.lambda_hi = 0.1;
    return o;
}

MonteCarloOptions realization_defaults() {
    MonteCarloOptions o;
    o.methods = {"lar", "lar-ls", "nuclear", "cadzow"};
    o.lambda_lo = 0.1;
    o.lambda_hi = 1.0;
    o.hankel.stable = true;
    return o;
}

TrialResult run_var_method(const std::string& method, const VarData& data, int rank,
                           const MonteCarloOptions& opts) {
    return timed(method, [&](TrialResult& r) {
        Matrix est;
        if (method == "lar") {
            est = lar_estimate(build_path(data.Y, data.Phi), rank);
        } else if (method == "lstsvd") {
            est = ls_tsvd(data.Y, data.Phi, rank);
        } else if (method == "nuclear") {
            Matrix warm;
            ProxOptions po = opts.prox;
            const auto hit = lambda_rank_search(
                grid_of(opts, rank),
                [&](double lambda) {
                    po.lambda = lambda;
                    ProxResult pr = nuclear_prox_solve(data.Y, data.Phi, po, false, warm.size() ? &warm : nullptr);
                    warm = pr.estimate;
                    return pr.estimate;
                },
                opts.rank_tol);
            if (!hit) throw SearchFailure("no rank-" + std::to_string(rank) + " solution on the lambda grid");
            est = hit->result;
            r.note = "lambda=" + std::to_string(hit->lambda);
        } else {
            throw ConfigError("unknown var method '" + method + "'");
        }
        r.error = squared_error(est, data.B);
        r.rank = numerical_rank(est, opts.rank_tol);
    }, opts.record_time);
}

TrialResult run_realization_method(const std::string& method, const RealizationData& data, int rank,
                                   const MonteCarloOptions& opts) {
    const HankelSpec spec{data.Y.rows(), data.Y.cols()};
    return timed(method, [&](TrialResult& r) {
        Matrix est;
        if (method == "lar" || method == "lar-ls") {
            HankelSolverOptions ho = opts.hankel;
            ho.rank_budget = rank;
            const HankelRegression problem(data.Y, Matrix::Identity(spec.rows, spec.rows), spec);
            const HankelLarResult path = run_path(problem, ho);
            r.atoms = path.active.atoms;
            if (method == "lar") {
                est = path.prediction;
                r.coefficients = path.active.coefficients;
            } else {
                const Vector c = debias(problem, r.atoms);
                r.coefficients.assign(c.data(), c.data() + c.size());
                est = synthesize(r.atoms, r.coefficients, spec).matrix;
            }
            canonicalize(r.atoms, r.coefficients);
            r.rank = path.achieved_rank;
        } else if (method == "nuclear") {
            HankelNuclearSolver solver(data.Y, Matrix::Identity(spec.rows, spec.rows), spec);
            solver.set_warm_start(true);
            HankelNuclearOptions ao = opts.admm;
            const auto hit = lambda_rank_search(
                grid_of(opts, rank),
                [&](double lambda) {
                    ao.lambda = lambda;
                    return solver.solve(ao);
                },
                [&](const HankelNuclearResult& res) { return numerical_rank(res.low_rank, opts.rank_tol); });
            if (!hit) throw SearchFailure("no rank-" + std::to_string(rank) + " solution on the lambda grid");
            est = hankel_map(hit->result.sequence, spec);
            r.rank = rank;
            r.note = "lambda=" + std::to_string(hit->lambda);
        } else if (method == "cadzow") {
            const CadzowResult c = cadzow(data.Y, rank, opts.cadzow_iterations, opts.cadzow_tol);
            est = hankel_map(c.sequence, spec);
            r.rank = numerical_rank(est, opts.rank_tol);
            if (!c.converged) r.note = "not converged";
        } else {
            throw ConfigError("unknown realization method '" + method + "'");
        }
        r.error = squared_error(est, data.X0);
    }, opts.record_time);
}

MonteCarloResult run_var_experiment(const VarConfig& cfg, const MonteCarloOptions& opts) {
    check_methods(opts, {"lar", "lstsvd", "nuclear"});
    cfg.validate();
    MonteCarloResult out;
    for (int t = 0; t < opts.trials; ++t) {
        VarConfig c = cfg;
        c.seed = substream(opts.seed, "trial", static_cast<std::uint64_t>(t));
        const VarData data = gen_var(c);
        for (const std::string& m : opts.methods) {
            TrialResult r = run_var_method(m, data, cfg.rank, opts);
            r.trial = t;
            r.seed = c.seed;
            out.trials.push_back(std::move(r));
        }
    }
    out.summary = summarize(out.trials, "var", opts.seed);
    return out;
}

MonteCarloResult run_realization_experiment(const RealizationConfig& cfg, const MonteCarloOptions& opts) {
    check_methods(opts, {"lar", "lar-ls", "nuclear", "cadzow"});
    cfg.validate();
    const int order = model_order(cfg);
    MonteCarloResult out;
    std::vector<PoleAtom> truth;
    for (int t = 0; t < opts.trials; ++t) {
        RealizationConfig c = cfg;
        c.seed = substream(opts.seed, "trial", static_cast<std::uint64_t>(t));
        const RealizationData data = gen_realization(c);
        if (t == 0) truth = data.atoms;
        for (const std::string& m : opts.methods) {
            TrialResult r = run_realization_method(m, data, order, opts);
            r.trial = t;
            r.seed = c.seed;
            out.trials.push_back(std::move(r));
        }
    }
    out.summary = summarize(out.trials, "realization", opts.seed, truth);
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ArgumentError("quantile: empty sample");
    if (!(q >= 0 && q <= 1)) throw ArgumentError("quantile: q must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<int> match_poles(const std::vector<PoleAtom>& truth, const std::vector<PoleAtom>& estimated) {
    struct Pair {
        double d;
        std::size_t t, e;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        for (std::size_t j = 0; j < estimated.size(); ++j) {
            pairs.push_back({std::abs(truth[i].pole() - estimated[j].pole()), i, j});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
    std::vector<int> out(truth.size(), -1);
    std::vector<bool> used(estimated.size(), false);
    for (const Pair& p : pairs) {
        if (out[p.t] >= 0 || used[p.e]) continue;
        out[p.t] = static_cast<int>(p.e);
        used[p.e] = true;
    }
    return out;
}

Summary summarize(const std::vector<TrialResult>& trials, const std::string& experiment,
                  std::uint64_t seed, const std::vector<PoleAtom>& truth) {
    if (trials.empty()) throw ArgumentError("summarize: no trial results");
    Summary s;
    s.experiment = experiment;
    s.seed = seed;
    std::vector<std::string> order;
    int max_trial = 0;
    for (const TrialResult& r : trials) {
        if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);
        max_trial = std::max(max_trial, r.trial);
    }
    s.trials = max_trial + 1;

    for (const std::string& m : order) {
        MethodSummary ms;
        ms.method = m;
        std::vector<double> errs;
        double secs = 0.0;
        for (const TrialResult& r : trials) {
            if (r.method != m) continue;
            ++ms.trials;
            secs += r.seconds;
            if (r.ok) {
                errs.push_back(r.error);
            } else {
                ++ms.failed;
            }
        }
        ms.mean_seconds = secs / ms.trials;
        if (!errs.empty()) {
            ms.median = quantile(errs, 0.5);
            ms.q1 = quantile(errs, 0.25);
            ms.q3 = quantile(errs, 0.75);
        } else {
            ms.median = ms.q1 = ms.q3 = std::numeric_limits<double>::quiet_NaN();
        }
        s.methods.push_back(ms);
    }
    for (const MethodSummary& a : s.methods) {
        for (const MethodSummary& b : s.methods) {
            if (a.method == b.method) continue;
            s.reductions.push_back({a.method, b.method, 1.0 - a.median / b.median});
        }
    }

    if (!truth.empty()) {
        std::vector<std::vector<PoleAtom>> hits(truth.size());
        for (const TrialResult& r : trials) {
            if (r.method != "lar" || !r.ok) continue;
            const std::vector<int> m = match_poles(truth, r.atoms);
            for (std::size_t i = 0; i < truth.size(); ++i) {
                if (m[i] >= 0) hits[i].push_back(r.atoms[static_cast<std::size_t>(m[i])]);
            }
        }
        for (std::size_t i = 0; i < truth.size(); ++i) {
            PoleStats ps;
            ps.truth = truth[i];
            ps.matched = static_cast<int>(hits[i].size());
            const auto stats = [&](auto get, double& mean, double& sd) {
                const auto n = static_cast<double>(hits[i].size());
                mean = sd = 0.0;
                if (hits[i].empty()) return;
                for (const PoleAtom& a : hits[i]) mean += get(a);
                mean /= n;
                if (hits[i].size() < 2) return;
                for (const PoleAtom& a : hits[i]) sd += (get(a) - mean) * (get(a) - mean);
                sd = std::sqrt(sd / (n - 1.0));
            };
            stats([](const PoleAtom& a) { return a.modulus; }, ps.modulus_mean, ps.modulus_std);
            stats([](const PoleAtom& a) { return a.angle; }, ps.angle_mean, ps.angle_std);
            stats([](const PoleAtom& a) { return a.phase; }, ps.phase_mean, ps.phase_std);
            s.poles.push_back(ps);
        }
    }
    return s;
}

}  // namespace lowrank

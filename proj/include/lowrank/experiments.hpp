#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lowrank/baselines.hpp"
#include "lowrank/hankel_atoms.hpp"
#include "lowrank/hankel_lar.hpp"
#include "lowrank/matrix_core.hpp"

namespace lowrank {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;
/// Seed of the named substream `index` under `master`.
std::uint64_t substream(std::uint64_t master, std::string_view name, std::uint64_t index = 0) noexcept;

struct VarConfig {
    int n = 40;
    int p = 80;
    int rank = 10;
    double spectral_radius = 0.95;
    double noise = 0.01;
    std::uint64_t seed = 0;

    void validate() const;
};

struct VarData {
    Matrix Phi;
    Matrix Y;
    /// True transition matrix X0 = B.
    Matrix B;
};

/// Low-rank first-order vector autoregression: Y = Phi B + E.
VarData gen_var(const VarConfig& cfg);

struct RealizationConfig {
    Index rows = 80;
    Index cols = 20;
    double noise = 0.01;
    std::uint64_t seed = 0;
    /// One entry per conjugate pair (upper half plane or real).
    std::vector<std::complex<double>> poles{{-0.6, 0.6}, {0.9, 0.2}, {0.2, 0.9}};
    std::vector<std::complex<double>> residues{{1.0, 0.0}, {1.0, -2.0}, {-1.0, -1.0}};

    void validate() const;
    [[nodiscard]] Index length() const noexcept { return rows + cols - 1; }
};

struct RealizationData {
    Sequence g;
    Sequence g_noisy;
    Matrix Y;
    Matrix X0;
    double d0 = 0.0;
    std::vector<PoleAtom> atoms;
    std::vector<double> coefficients;
};

/// Impulse response g_k = d0 sum_i (d_i q_i^(k-1) + conj), k = 1..m+n-1, with d0
/// chosen so the infinite response has unit energy.
RealizationData gen_realization(const RealizationConfig& cfg);

/// Sum over k >= 1 of g_k^2 for d0 = 1, in closed form.
double impulse_energy(const std::vector<std::complex<double>>& poles,
                      const std::vector<std::complex<double>>& residues);

struct TrialResult {
    std::string method;
    int trial = 0;
    std::uint64_t seed = 0;
    double error = 0.0;
    double seconds = 0.0;
    int rank = 0;
    bool ok = true;
    std::string note;
    std::vector<PoleAtom> atoms;
    std::vector<double> coefficients;

    bool operator==(const TrialResult&) const = default;
};

struct MethodSummary {
    std::string method;
    int trials = 0;
    int failed = 0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double mean_seconds = 0.0;
};

/// 1 - median(method) / median(baseline).
struct Reduction {
    std::string method;
    std::string baseline;
    double value = 0.0;
};

struct PoleStats {
    PoleAtom truth;
    int matched = 0;
    double modulus_mean = 0.0, modulus_std = 0.0;
    double angle_mean = 0.0, angle_std = 0.0;
    double phase_mean = 0.0, phase_std = 0.0;
};

struct Summary {
    std::string experiment;
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<MethodSummary> methods;
    std::vector<Reduction> reductions;
    /// Recovered poles of the "lar" method against the true model.
    std::vector<PoleStats> poles;
};

struct MonteCarloOptions {
    int trials = 120;
    std::uint64_t seed = 0;
    std::vector<std::string> methods;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    int lambda_count = 20;
    double rank_tol = kDefaultRankTol;
    /// Used by the Hankel LAR methods; rank_budget is overwritten with the model order.
    HankelSolverOptions hankel{};
    int cadzow_iterations = 500;
    double cadzow_tol = 1e-10;
    ProxOptions prox{};
    HankelNuclearOptions admm{};
    /// Wall-clock timing per solver call; off gives bit-identical reruns.
    bool record_time = true;
};

struct MonteCarloResult {
    std::vector<TrialResult> trials;
    Summary summary;
};

/// Defaults for the two experiments (methods and lambda grids).
MonteCarloOptions var_defaults();
MonteCarloOptions realization_defaults();

/// Per-trial data seeds come from substream(opts.seed, "trial", t); cfg.seed is ignored.
MonteCarloResult run_var_experiment(const VarConfig& cfg, const MonteCarloOptions& opts);
MonteCarloResult run_realization_experiment(const RealizationConfig& cfg, const MonteCarloOptions& opts);

/// Single-trial runners, exposed for tests and the CLI.
TrialResult run_var_method(const std::string& method, const VarData& data, int rank,
                           const MonteCarloOptions& opts);
TrialResult run_realization_method(const std::string& method, const RealizationData& data, int rank,
                                   const MonteCarloOptions& opts);

/// Aggregates trial records. `truth` enables pole statistics for "lar".
Summary summarize(const std::vector<TrialResult>& trials, const std::string& experiment,
                  std::uint64_t seed, const std::vector<PoleAtom>& truth = {});

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

/// Pairs each true pole with the nearest distinct estimated pole (complex distance);
/// result[i] indexes `estimated` or is -1.
std::vector<int> match_poles(const std::vector<PoleAtom>& truth, const std::vector<PoleAtom>& estimated);

/// Model order of the true system (2 per complex pole, 1 per real pole).
int model_order(const RealizationConfig& cfg);

}  // namespace lowrank

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "lowrank/matrix_core.hpp"

namespace lowrank {

struct ProxOptions {
    double lambda = 0.0;
    int max_iterations = 20000;
    /// Relative iterate change ||X_k+1 - X_k|| / max(1, ||X_k+1||) stopping threshold.
    double tolerance = 1e-9;
    bool accelerate = true;
    /// Record the objective after every iteration.
    bool trace_objective = false;
};

struct ProxResult {
    Matrix estimate;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective;
};

/// 0.5 ||Y - Phi X||_F^2 + lambda ||X||_* (or lambda ||S_phi V_phi^T X||_* when normalized).
double nuclear_objective(const Matrix& Y, const Matrix& Phi, const Matrix& X, double lambda,
                         bool normalized);

/// Accelerated proximal gradient with objective-based momentum restart. The
/// normalized variant runs in the coordinates W = S_phi V_phi^T X.
/// Non-convergence is reported through `converged`, never thrown.
ProxResult nuclear_prox_solve(const Matrix& Y, const Matrix& Phi, const ProxOptions& opts,
                              bool normalized, const Matrix* warm_start = nullptr);

struct HankelNuclearOptions {
    double lambda = 0.0;
    int max_iterations = 20000;
    /// Absolute/relative tolerance on primal and dual residuals.
    double tolerance = 1e-7;
    double penalty = 1.0;
    bool adapt_penalty = true;
};

struct HankelNuclearResult {
    Sequence sequence;
    /// Singular-value-thresholded split variable (exactly low rank).
    Matrix low_rank;
    int iterations = 0;
    bool converged = false;
};

struct HankelNuclearWarmStart {
    Sequence sequence;
    Matrix low_rank;
    Matrix dual;
    double penalty = 1.0;
};

/// Minimizes 0.5 ||Y - Phi H(x)||_F^2 + lambda ||H(x)||_* over sequences x by
/// alternating-direction splitting on Z = H(x).
class HankelNuclearSolver {
public:
    HankelNuclearSolver(const Matrix& Y, const Matrix& Phi, const HankelSpec& spec);

    HankelNuclearResult solve(const HankelNuclearOptions& opts);
    /// Objective of the problem at sequence x.
    [[nodiscard]] double objective(const Sequence& x, double lambda) const;
    /// Keeps the split and dual variables of the last solve as the next start.
    void set_warm_start(bool on) noexcept { warm_ = on; }

private:
    Matrix Y_;
    Matrix Phi_;
    HankelSpec spec_;
    Matrix normal_;   // A^T A, A: x -> vec(Phi H(x))
    Vector rhs_;      // A^T vec(Y)
    Vector counts_;   // anti-diagonal sizes (H^T H)
    bool warm_ = false;
    std::optional<HankelNuclearWarmStart> state_;
};

HankelNuclearResult hankel_nuclear_solve(const Matrix& Y, const Matrix& Phi, const HankelSpec& spec,
                                         const HankelNuclearOptions& opts);

struct LambdaGrid {
    std::vector<double> values;
    int target_rank = 1;

    /// `count` logarithmically spaced values in [lo, hi].
    static LambdaGrid logspace(double lo, double hi, int count, int target_rank);
};

template <class Result>
struct RankSearchHit {
    double lambda = 0.0;
    std::size_t index = 0;
    Result result;
};

/// Runs `solve(lambda)` over the grid from the largest lambda down and returns
/// the smallest-lambda solution whose `rank_of(result)` equals the target rank;
/// nullopt when no grid point achieves it.
template <class Solve, class RankOf>
auto lambda_rank_search(const LambdaGrid& grid, Solve&& solve, RankOf&& rank_of)
    -> std::optional<RankSearchHit<std::decay_t<decltype(solve(0.0))>>> {
    using Result = std::decay_t<decltype(solve(0.0))>;
    if (grid.values.empty()) return std::nullopt;
    std::vector<std::size_t> order(grid.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grid.values[a] > grid.values[b]; });
    std::optional<RankSearchHit<Result>> hit;
    for (std::size_t idx : order) {
        Result res = solve(grid.values[idx]);
        if (rank_of(res) == grid.target_rank) {
            hit = RankSearchHit<Result>{grid.values[idx], idx, std::move(res)};
        }
    }
    return hit;
}

/// Matrix-valued convenience overload classifying with numerical_rank.
template <class Solve>
std::optional<RankSearchHit<Matrix>> lambda_rank_search(const LambdaGrid& grid, Solve&& solve,
                                                        double rank_tol = kDefaultRankTol) {
    return lambda_rank_search(grid, std::forward<Solve>(solve),
                              [rank_tol](const Matrix& m) { return numerical_rank(m, rank_tol); });
}

struct CadzowResult {
    Sequence sequence;
    int iterations = 0;
    bool converged = false;
    /// Distance between the rank-r truncation and its Hankel projection, per iteration.
    std::vector<double> gaps;
};

/// Alternating projections between rank-r matrices and Hankel matrices.
CadzowResult cadzow(const Matrix& Y, int r, int max_iters = 500, double tol = 1e-10);

}  // namespace lowrank

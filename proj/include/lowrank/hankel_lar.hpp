#pragma once

#include <optional>
#include <vector>

#include "lowrank/hankel_atoms.hpp"
#include "lowrank/matrix_core.hpp"

namespace lowrank {

struct HankelSolverOptions {
    /// Target rank; real poles consume 1, complex pairs 2.
    int rank_budget = 0;
    /// Minimum distance |z - z'| between selected poles in the complex plane.
    double separation = 0.01;
    /// Restrict poles to |z| <= 1.
    bool stable = true;
    /// Largest modulus searched when `stable` is off.
    double modulus_cap = 2.0;
    int angle_points = 64;
    int modulus_points = 32;
    /// Simplex refinement: vertex-spread tolerance, iteration cap, number of starts.
    double refine_tol = 1e-8;
    int max_refine_iters = 200;
    int refine_starts = 8;
    int max_iterations = 1000;
    /// Evaluate grid candidates with the OpenMP kernel (serial reference otherwise).
    bool parallel = true;
    /// When non-empty, candidates are restricted to these atoms and their negations
    /// (no grid, no refinement).
    std::vector<PoleAtom> finite_dictionary;

    void validate() const;
};

/// Measurement Y (p x n), regressor Phi (p x m) and cached products.
class HankelRegression {
public:
    HankelRegression(Matrix Y, Matrix Phi, HankelSpec spec);

    [[nodiscard]] const Matrix& Y() const noexcept { return Y_; }
    [[nodiscard]] const Matrix& Phi() const noexcept { return Phi_; }
    [[nodiscard]] const HankelSpec& spec() const noexcept { return spec_; }
    /// Phi^T Phi, or an empty matrix when Phi is the identity.
    [[nodiscard]] const Matrix& gram() const noexcept { return G_; }
    [[nodiscard]] bool identity_regressor() const noexcept { return identity_; }

    /// Phi^T Gamma.
    [[nodiscard]] Matrix adjoint(const Matrix& Gamma) const;
    /// Phi X for the atom.
    [[nodiscard]] Matrix image(const PoleAtom& a) const;
    /// Phi^T Phi materialized (identity when Phi = I).
    [[nodiscard]] Matrix dense_gram() const;

private:
    Matrix Y_;
    Matrix Phi_;
    HankelSpec spec_;
    Matrix G_;
    bool identity_ = false;
};

/// Selected atoms with their path coefficients and cached images.
struct ActiveSet {
    std::vector<PoleAtom> atoms;
    std::vector<double> coefficients;
    std::vector<double> norms;
    std::vector<Matrix> images;
    /// Pairwise Frobenius inner products of the images.
    Matrix gram;

    void add(const PoleAtom& a, Matrix image);
    [[nodiscard]] int consumed_rank() const;
    [[nodiscard]] std::size_t size() const noexcept { return atoms.size(); }
};

/// Normalized correlation <Phi X, Gamma>/||Phi X|| for W = Phi^T Gamma.
/// Throws SearchFailure for a zero-norm atom.
double correlation(const PoleAtom& a, const HankelRegression& problem, const Matrix& W);

/// Atom maximizing the normalized correlation with Gamma (W = Phi^T Gamma),
/// keeping |z - z_i| >= separation from every excluded pole.
PoleAtom optimize_atom(const HankelRegression& problem, const Matrix& W,
                       const HankelSolverOptions& opts, const std::vector<PoleAtom>& exclusion);

struct EquiangularDirection {
    Vector weights;
    Matrix direction;
};

/// Solves gram * weights = norms; direction = sum_k weights_k * image_k.
/// Throws IllConditionedError when the Gram condition number exceeds 1e12.
EquiangularDirection equiangular_direction(const ActiveSet& active);

struct NextAtom {
    PoleAtom atom;
    double step = 0.0;
};

/// Smallest step eta >= 0 along `direction` at which a new atom (outside the
/// separation balls of the active set) reaches the active correlation.
/// `level` is the current common normalized correlation of the active set.
/// Returns nullopt when no candidate can join (residual spanned).
std::optional<NextAtom> step_to_next_atom(const HankelRegression& problem, const Matrix& residual,
                                          const Matrix& direction, double level,
                                          const ActiveSet& active, const HankelSolverOptions& opts);

struct HankelLarIteration {
    double step = 0.0;
    Vector weights;
    Matrix direction;
    /// Prediction after the step.
    Matrix prediction;
    double residual_norm = 0.0;
    /// Common correlation level of the active set after the step.
    double level = 0.0;
    /// Normalized residual correlations of the atoms active during the step, after it.
    std::vector<double> active_correlations;
    /// Path coefficients after the step, one per atom active during the step.
    std::vector<double> coefficients;
    std::optional<PoleAtom> entered;
    int consumed_rank = 0;
};

enum class PathStop {
    RankBudget,       ///< the next atom would exceed the budget
    ParityMismatch,   ///< next atom is complex and only one unit of rank is left
    ResidualSpanned,  ///< no positive step exists
    IterationLimit,
    EmptyBudget,
};

struct HankelLarResult {
    ActiveSet active;
    std::vector<HankelLarIteration> history;
    Matrix prediction;
    int achieved_rank = 0;
    PathStop stop = PathStop::EmptyBudget;
};

HankelLarResult run_path(const HankelRegression& problem, const HankelSolverOptions& opts);

/// Unconstrained least-squares refit of the coefficients on the given atoms.
Vector debias(const HankelRegression& problem, const std::vector<PoleAtom>& atoms);

/// Flips phase by pi wherever the coefficient is negative so every reported
/// coefficient is nonnegative.
void canonicalize(std::vector<PoleAtom>& atoms, std::vector<double>& coefficients);

}  // namespace lowrank

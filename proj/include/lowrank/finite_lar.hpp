#pragma once

#include <optional>
#include <vector>

#include "lowrank/matrix_core.hpp"

namespace lowrank {

/// Finite set of p-dimensional covariates, one per column.
struct Dictionary {
    Matrix covariates;
    /// Columns already have unit Euclidean norm (checked to 1e-10).
    bool normalized = false;
};

/// One breakpoint of the least-angle path.
///
/// `coefficients` are in the units of the caller's dictionary (rescaled when
/// the dictionary was normalized internally). `weights` and `correlation` are
/// expressed for the unit-norm, sign-adjusted active columns.
struct LarStep {
    /// Active set after the step (the indices whose correlations are tied).
    std::vector<Index> active;
    Vector coefficients;
    double step = 0.0;
    /// Equiangular weights for the active set used during the step.
    Vector weights;
    double residual_norm = 0.0;
    /// Common absolute residual correlation of the active set after the step;
    /// the lasso penalty at this breakpoint.
    double correlation = 0.0;
    std::optional<Index> entered;
    std::optional<Index> dropped;
};

/// Least-angle regression path over a finite dictionary.
///
/// Without `lasso_mode` every step adds one covariate. With it, a coefficient
/// that reaches zero is removed from the active set before continuing, which
/// traces the lasso breakpoints. The path ends early once every covariate is
/// active (final least-squares step) or the residual vanishes.
std::vector<LarStep> lar_path(const Dictionary& dict, const Vector& y, int max_steps,
                              bool lasso_mode = false);

/// Solves G x = rhs for a symmetric positive definite Gram matrix, falling back
/// to a pseudo-inverse at relative tolerance 1e-12. Throws IllConditionedError
/// when G is numerically singular.
Vector solve_gram(const Matrix& G, const Vector& rhs);

}  // namespace lowrank

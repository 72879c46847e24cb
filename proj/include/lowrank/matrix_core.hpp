#pragma once

#include <Eigen/Dense>

namespace lowrank {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Real sequence x_1..x_N stored 0-based.
using Sequence = Eigen::VectorXd;

/// Default relative threshold used to classify the rank of computed estimates.
inline constexpr double kDefaultRankTol = 1e-6;

/// Shape of an m x n Hankel matrix built from a length m+n-1 sequence.
struct HankelSpec {
    Index rows = 1;
    Index cols = 1;

    /// Validating constructor; throws ArgumentError for non-positive sizes.
    static HankelSpec make(Index rows, Index cols);
    /// Spec for the Hankel matrix with `rows` rows spanning a sequence of `length`.
    static HankelSpec from_length(Index length, Index rows);

    [[nodiscard]] Index length() const noexcept { return rows + cols - 1; }
    [[nodiscard]] Index max_rank() const noexcept { return rows < cols ? rows : cols; }

    friend bool operator==(const HankelSpec&, const HankelSpec&) = default;
};

/// Singular triplets with S in descending order (thin factors).
struct SvdFactors {
    Matrix U;
    Vector S;
    Matrix V;

    [[nodiscard]] Matrix reconstruct() const;
};

/// Entry (i,k) of the result is seq(i+k) (0-based).
Matrix hankel_map(const Sequence& seq, const HankelSpec& spec);

/// Orthogonal projection onto Hankel structure: averages each anti-diagonal.
Sequence hankel_adjoint_average(const Matrix& M);

/// Adjoint of hankel_map: sums each anti-diagonal.
Sequence hankel_adjoint_sum(const Matrix& M);

/// Number of entries on each anti-diagonal of an m x n matrix.
Vector hankel_diagonal_counts(const HankelSpec& spec);

SvdFactors svd(const Matrix& M);

double frob_inner(const Matrix& A, const Matrix& B);

/// Count of singular values above tol_rel times the largest one.
int numerical_rank(const Matrix& M, double tol_rel = kDefaultRankTol);
int numerical_rank_of_values(const Vector& singular_values, double tol_rel = kDefaultRankTol);

/// Throws ArgumentError when any entry is NaN or infinite.
void require_finite(const Matrix& M, const char* what);

}  // namespace lowrank

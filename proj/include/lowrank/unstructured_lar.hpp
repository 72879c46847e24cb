#pragma once

#include "lowrank/matrix_core.hpp"

namespace lowrank {

/// Relative threshold below which Phi is declared column-rank deficient.
inline constexpr double kFullRankTol = 1e-10;

/// Everything needed to evaluate the closed-form LAR estimate for any rank.
///
/// Phi = U_phi diag(S_phi) V_phi^T and U_phi^T Y = U_data diag(sigma0) V_data^T.
struct UnstructuredPath {
    Matrix U_phi;
    Vector S_phi;
    Matrix V_phi;
    Matrix U_data;
    Vector sigma0;
    Matrix V_data;

    /// min(m, n)
    [[nodiscard]] Index max_rank() const noexcept { return sigma0.size(); }
};

/// Best rank-r approximation in Frobenius norm (truncated SVD).
Matrix truncated_svd_approx(const Matrix& Y, int r);

UnstructuredPath build_path(const Matrix& Y, const Matrix& Phi);

/// sigma0_i - sigma0_{r+1} for i <= r, with sigma0_{n+1} := 0.
Vector lar_coefficients(const UnstructuredPath& path, int r);

/// Rank-r LAR estimate V_phi S_phi^{-1} sum_i (sigma0_i - sigma0_{r+1}) u_i v_i^T.
Matrix lar_estimate(const UnstructuredPath& path, int r);

/// Number of strictly positive LAR coefficients at rank r. Smaller than r only
/// when sigma0_r == sigma0_{r+1}.
int effective_rank(const UnstructuredPath& path, int r);

/// Singular value soft-thresholding: sum_i max(s_i - lambda, 0) u_i v_i^T.
Matrix svt_shrink(const Matrix& Y, double lambda);

/// Minimum-norm least-squares solution of min ||Y - Phi X||_F.
Matrix least_squares(const Matrix& Y, const Matrix& Phi);

/// Least squares followed by rank-r truncation.
Matrix ls_tsvd(const Matrix& Y, const Matrix& Phi, int r);

/// Throws RegressorError unless the smallest singular value of Phi exceeds
/// kFullRankTol times the largest.
void require_full_column_rank(const Matrix& Phi);

}  // namespace lowrank

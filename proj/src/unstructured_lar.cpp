#include "lowrank/unstructured_lar.hpp"

#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

void require_rank_in_range(int r, Index max_rank, const char* what) {
    if (r < 1 || r > max_rank) {
        throw ArgumentError(std::string(what) + ": rank " + std::to_string(r) + " outside [1, " +
                            std::to_string(max_rank) + "]");
    }
}

}  // namespace

void require_full_column_rank(const Matrix& Phi) {
    if (Phi.cols() == 0 || Phi.rows() < Phi.cols()) {
        throw RegressorError("regressor must have at least as many rows as columns");
    }
    Eigen::JacobiSVD<Matrix> s(Phi);
    const Vector& sv = s.singularValues();
    if (!(sv(sv.size() - 1) > kFullRankTol * sv(0))) {
        throw RegressorError("regressor is not of full column rank");
    }
}

Matrix truncated_svd_approx(const Matrix& Y, int r) {
    const Index n_bar = std::min(Y.rows(), Y.cols());
    require_rank_in_range(r, n_bar, "truncated_svd_approx");
    const SvdFactors f = svd(Y);
    return f.U.leftCols(r) * f.S.head(r).asDiagonal() * f.V.leftCols(r).transpose();
}

UnstructuredPath build_path(const Matrix& Y, const Matrix& Phi) {
    if (Y.rows() != Phi.rows()) throw DimensionError("build_path: Y and Phi row counts differ");
    require_finite(Y, "build_path");
    require_finite(Phi, "build_path");
    require_full_column_rank(Phi);

    UnstructuredPath path;
    SvdFactors phi = svd(Phi);
    path.U_phi = std::move(phi.U);
    path.S_phi = std::move(phi.S);
    path.V_phi = std::move(phi.V);

    SvdFactors data = svd(path.U_phi.transpose() * Y);
    path.U_data = std::move(data.U);
    path.sigma0 = std::move(data.S);
    path.V_data = std::move(data.V);
    return path;
}

Vector lar_coefficients(const UnstructuredPath& path, int r) {
    require_rank_in_range(r, path.max_rank(), "lar_estimate");
    const double floor = r < path.max_rank() ? path.sigma0(r) : 0.0;
    return (path.sigma0.head(r).array() - floor).matrix();
}

Matrix lar_estimate(const UnstructuredPath& path, int r) {
    const Vector coef = lar_coefficients(path, r);
    const Matrix core = path.U_data.leftCols(r) * coef.asDiagonal() * path.V_data.leftCols(r).transpose();
    return path.V_phi * path.S_phi.cwiseInverse().asDiagonal() * core;
}

int effective_rank(const UnstructuredPath& path, int r) {
    const Vector coef = lar_coefficients(path, r);
    return static_cast<int>((coef.array() > 0.0).count());
}

Matrix svt_shrink(const Matrix& Y, double lambda) {
    if (!(lambda >= 0)) throw ArgumentError("svt_shrink: lambda must be nonnegative");
    const SvdFactors f = svd(Y);
    const Vector shrunk = (f.S.array() - lambda).cwiseMax(0.0).matrix();
    return f.U * shrunk.asDiagonal() * f.V.transpose();
}

Matrix least_squares(const Matrix& Y, const Matrix& Phi) {
    if (Y.rows() != Phi.rows()) throw DimensionError("least_squares: Y and Phi row counts differ");
    return Phi.completeOrthogonalDecomposition().solve(Y);
}

Matrix ls_tsvd(const Matrix& Y, const Matrix& Phi, int r) {
    require_full_column_rank(Phi);
    return truncated_svd_approx(least_squares(Y, Phi), r);
}

}  // namespace lowrank

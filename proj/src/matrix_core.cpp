#include "lowrank/matrix_core.hpp"

#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {

HankelSpec HankelSpec::make(Index rows, Index cols) {
    if (rows < 1 || cols < 1) {
        throw ArgumentError("HankelSpec: rows and cols must be >= 1 (got " + std::to_string(rows) +
                            "x" + std::to_string(cols) + ")");
    }
    return HankelSpec{rows, cols};
}

HankelSpec HankelSpec::from_length(Index length, Index rows) {
    if (rows < 1 || rows > length) {
        throw ArgumentError("HankelSpec: row count " + std::to_string(rows) +
                            " incompatible with sequence length " + std::to_string(length));
    }
    return make(rows, length - rows + 1);
}

Matrix SvdFactors::reconstruct() const { return U * S.asDiagonal() * V.transpose(); }

Matrix hankel_map(const Sequence& seq, const HankelSpec& spec) {
    if (seq.size() != spec.length()) {
        throw DimensionError("hankel_map: sequence length " + std::to_string(seq.size()) +
                             " != rows + cols - 1 = " + std::to_string(spec.length()));
    }
    Matrix H(spec.rows, spec.cols);
    for (Index k = 0; k < spec.cols; ++k) {
        H.col(k) = seq.segment(k, spec.rows);
    }
    return H;
}

Sequence hankel_adjoint_sum(const Matrix& M) {
    if (M.rows() < 1 || M.cols() < 1) throw DimensionError("hankel_adjoint_sum: empty matrix");
    Sequence s = Sequence::Zero(M.rows() + M.cols() - 1);
    for (Index k = 0; k < M.cols(); ++k) {
        s.segment(k, M.rows()) += M.col(k);
    }
    return s;
}

Vector hankel_diagonal_counts(const HankelSpec& spec) {
    Vector counts(spec.length());
    for (Index d = 0; d < spec.length(); ++d) {
        const Index lo = d - (spec.cols - 1) > 0 ? d - (spec.cols - 1) : 0;
        const Index hi = d < spec.rows - 1 ? d : spec.rows - 1;
        counts(d) = static_cast<double>(hi - lo + 1);
    }
    return counts;
}

Sequence hankel_adjoint_average(const Matrix& M) {
    const Sequence sums = hankel_adjoint_sum(M);
    return sums.cwiseQuotient(hankel_diagonal_counts(HankelSpec{M.rows(), M.cols()}));
}

void require_finite(const Matrix& M, const char* what) {
    if (!M.allFinite()) throw ArgumentError(std::string(what) + ": non-finite entries");
}

SvdFactors svd(const Matrix& M) {
    require_finite(M, "svd");
    if (M.size() == 0) return {Matrix(M.rows(), 0), Vector(0), Matrix(M.cols(), 0)};
    Eigen::JacobiSVD<Matrix> solver(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success) throw NumericalError("svd: factorization did not converge");
    // JacobiSVD already returns descending, nonnegative singular values.
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double frob_inner(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw DimensionError("frob_inner: shape mismatch");
    }
    return A.cwiseProduct(B).sum();
}

int numerical_rank_of_values(const Vector& singular_values, double tol_rel) {
    if (!(tol_rel > 0)) throw ArgumentError("numerical_rank: tolerance must be positive");
    if (singular_values.size() == 0) return 0;
    const double top = singular_values.maxCoeff();
    if (top <= 0) return 0;
    int rank = 0;
    for (Index i = 0; i < singular_values.size(); ++i) {
        if (singular_values(i) > tol_rel * top) ++rank;
    }
    return rank;
}

int numerical_rank(const Matrix& M, double tol_rel) {
    if (!(tol_rel > 0)) throw ArgumentError("numerical_rank: tolerance must be positive");
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> solver(M);
    return numerical_rank_of_values(solver.singularValues(), tol_rel);
}

}  // namespace lowrank

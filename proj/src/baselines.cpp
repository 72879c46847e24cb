#include "lowrank/baselines.hpp"

#include <cmath>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/unstructured_lar.hpp"

namespace lowrank {

namespace {

struct Shrunk {
    Matrix matrix;
    double nuclear = 0.0;
};

Shrunk shrink(const Matrix& M, double threshold) {
    const SvdFactors f = svd(M);
    const Vector s = (f.S.array() - threshold).cwiseMax(0.0).matrix();
    return {f.U * s.asDiagonal() * f.V.transpose(), s.sum()};
}

double nuclear_norm(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> s(M);
    return s.singularValues().sum();
}

}  // namespace

double nuclear_objective(const Matrix& Y, const Matrix& Phi, const Matrix& X, double lambda,
                         bool normalized) {
    const double fit = 0.5 * (Y - Phi * X).squaredNorm();
    if (!normalized) return fit + lambda * nuclear_norm(X);
    const SvdFactors phi = svd(Phi);
    return fit + lambda * nuclear_norm(phi.S.asDiagonal() * phi.V.transpose() * X);
}

ProxResult nuclear_prox_solve(const Matrix& Y, const Matrix& Phi, const ProxOptions& opts,
                              bool normalized, const Matrix* warm_start) {
    if (!(opts.lambda >= 0)) throw ArgumentError("nuclear_prox_solve: lambda must be nonnegative");
    if (!(opts.tolerance > 0)) throw ArgumentError("nuclear_prox_solve: tolerance must be positive");
    if (Y.rows() != Phi.rows()) throw DimensionError("nuclear_prox_solve: Y and Phi row counts differ");
    require_full_column_rank(Phi);

    // Work with min 0.5||Y - A V||^2 + lambda ||V||_* and map V back to X.
    Matrix A;
    Matrix to_x;    // X = to_x * V
    Matrix from_x;  // V = from_x * X
    if (normalized) {
        SvdFactors phi = svd(Phi);
        A = std::move(phi.U);
        to_x = phi.V * phi.S.cwiseInverse().asDiagonal();
        from_x = phi.S.asDiagonal() * phi.V.transpose();
    } else {
        A = Phi;
    }
    const Matrix AtA = A.transpose() * A;
    const Matrix AtY = A.transpose() * Y;
    const double smax = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
    const double L = smax * smax;
    const double thresh = opts.lambda / L;

    const auto objective = [&](const Matrix& V, double nuc) {
        return 0.5 * (Y - A * V).squaredNorm() + opts.lambda * nuc;
    };

    Matrix x = Matrix::Zero(A.cols(), Y.cols());
    if (warm_start != nullptr) {
        if (warm_start->rows() != Phi.cols() || warm_start->cols() != Y.cols()) {
            throw DimensionError("nuclear_prox_solve: warm start has the wrong shape");
        }
        x = normalized ? Matrix(from_x * *warm_start) : *warm_start;
    }
    double f_x = objective(x, nuclear_norm(x));
    Matrix y = x;
    double t = 1.0;

    ProxResult res;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Shrunk next = shrink(y - (AtA * y - AtY) / L, thresh);
        double f_next = objective(next.matrix, next.nuclear);
        if (opts.accelerate && f_next > f_x) {
            // Momentum overshoot: restart from the last iterate with a plain step.
            t = 1.0;
            y = x;
            next = shrink(x - (AtA * x - AtY) / L, thresh);
            f_next = objective(next.matrix, next.nuclear);
        }
        const double change = (next.matrix - x).norm() / std::max(1.0, next.matrix.norm());
        if (opts.accelerate) {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = next.matrix + ((t - 1.0) / t_next) * (next.matrix - x);
            t = t_next;
        } else {
            y = next.matrix;
        }
        x = std::move(next.matrix);
        f_x = f_next;
        if (opts.trace_objective) res.objective.push_back(f_x);
        res.iterations = it;
        if (change < opts.tolerance) {
            res.converged = true;
            break;
        }
    }
    res.estimate = normalized ? Matrix(to_x * x) : x;
    return res;
}

HankelNuclearSolver::HankelNuclearSolver(const Matrix& Y, const Matrix& Phi, const HankelSpec& spec)
    : Y_(Y), Phi_(Phi), spec_(spec) {
    if (Phi_.cols() != spec_.rows || Y_.rows() != Phi_.rows() || Y_.cols() != spec_.cols) {
        throw DimensionError("hankel_nuclear_solve: inconsistent shapes");
    }
    require_full_column_rank(Phi_);
    const Index N = spec_.length();
    counts_ = hankel_diagonal_counts(spec_);
    const Matrix G = Phi_.transpose() * Phi_;
    rhs_ = hankel_adjoint_sum(Phi_.transpose() * Y_);
    normal_.resize(N, N);
    for (Index l = 0; l < N; ++l) {
        Sequence e = Sequence::Zero(N);
        e(l) = 1.0;
        normal_.col(l) = hankel_adjoint_sum(G * hankel_map(e, spec_));
    }
}

double HankelNuclearSolver::objective(const Sequence& x, double lambda) const {
    const Matrix H = hankel_map(x, spec_);
    return 0.5 * (Y_ - Phi_ * H).squaredNorm() + lambda * nuclear_norm(H);
}

HankelNuclearResult HankelNuclearSolver::solve(const HankelNuclearOptions& opts) {
    if (!(opts.lambda >= 0)) throw ArgumentError("hankel_nuclear_solve: lambda must be nonnegative");
    if (!(opts.tolerance > 0) || !(opts.penalty > 0)) {
        throw ArgumentError("hankel_nuclear_solve: tolerance and penalty must be positive");
    }
    const Index N = spec_.length();
    const double sqrt_mn = std::sqrt(static_cast<double>(spec_.rows * spec_.cols));
    const double sqrt_N = std::sqrt(static_cast<double>(N));

    double rho = opts.penalty;
    Sequence x = Sequence::Zero(N);
    Matrix Z = Matrix::Zero(spec_.rows, spec_.cols);
    Matrix U = Matrix::Zero(spec_.rows, spec_.cols);
    if (warm_ && state_) {
        x = state_->sequence;
        Z = state_->low_rank;
        U = state_->dual;
        rho = state_->penalty;
    }

    Eigen::LDLT<Matrix> factor;
    const auto refactor = [&] {
        Matrix K = normal_;
        K.diagonal() += rho * counts_;
        factor.compute(K);
    };
    refactor();

    HankelNuclearResult res;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        x = factor.solve(rhs_ + rho * hankel_adjoint_sum(Z - U));
        const Matrix Hx = hankel_map(x, spec_);
        const Matrix Z_old = Z;
        Z = shrink(Hx + U, opts.lambda / rho).matrix;
        U += Hx - Z;

        const double primal = (Hx - Z).norm();
        const double dual = rho * hankel_adjoint_sum(Z - Z_old).norm();
        const double eps_primal = opts.tolerance * (sqrt_mn + std::max(Hx.norm(), Z.norm()));
        const double eps_dual = opts.tolerance * (sqrt_N + rho * hankel_adjoint_sum(U).norm());
        res.iterations = it;
        if (primal < eps_primal && dual < eps_dual) {
            res.converged = true;
            break;
        }
        if (opts.adapt_penalty) {
            if (primal > 10.0 * dual) {
                rho *= 2.0;
                U /= 2.0;
                refactor();
            } else if (dual > 10.0 * primal) {
                rho /= 2.0;
                U *= 2.0;
                refactor();
            }
        }
    }
    state_ = HankelNuclearWarmStart{x, Z, U, rho};
    res.sequence = std::move(x);
    res.low_rank = std::move(Z);
    return res;
}

HankelNuclearResult hankel_nuclear_solve(const Matrix& Y, const Matrix& Phi, const HankelSpec& spec,
                                         const HankelNuclearOptions& opts) {
    HankelNuclearSolver solver(Y, Phi, spec);
    return solver.solve(opts);
}

LambdaGrid LambdaGrid::logspace(double lo, double hi, int count, int target_rank) {
    if (!(lo > 0) || !(hi >= lo) || count < 1) throw ArgumentError("LambdaGrid: need 0 < lo <= hi and count >= 1");
    LambdaGrid g;
    g.target_rank = target_rank;
    g.values.resize(static_cast<std::size_t>(count));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < count; ++i) {
        const double frac = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        g.values[static_cast<std::size_t>(i)] = std::pow(10.0, a + frac * (b - a));
    }
    return g;
}

CadzowResult cadzow(const Matrix& Y, int r, int max_iters, double tol) {
    if (r < 1) throw ArgumentError("cadzow: rank must be >= 1");
    if (max_iters < 1) throw ArgumentError("cadzow: max_iters must be >= 1");
    require_finite(Y, "cadzow");
    const HankelSpec spec{Y.rows(), Y.cols()};
    const int r_eff = static_cast<int>(std::min<Index>(r, spec.max_rank()));

    CadzowResult res;
    Matrix M = Y;
    Sequence seq = hankel_adjoint_average(M);
    for (int it = 1; it <= max_iters; ++it) {
        const Matrix T = truncated_svd_approx(M, r_eff);
        seq = hankel_adjoint_average(T);
        const Matrix next = hankel_map(seq, spec);
        res.gaps.push_back((T - next).norm());
        const double change = (next - M).norm();
        M = next;
        res.iterations = it;
        if (change < tol) {
            res.converged = true;
            break;
        }
    }
    res.sequence = std::move(seq);
    return res;
}

}  // namespace lowrank

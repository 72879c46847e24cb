#include "lowrank/finite_lar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

constexpr double kGramTol = 1e-12;

bool contains(const std::vector<Index>& v, Index k) {
    return std::find(v.begin(), v.end(), k) != v.end();
}

}  // namespace

Vector solve_gram(const Matrix& G, const Vector& rhs) {
    Eigen::LLT<Matrix> llt(G);
    if (llt.info() == Eigen::Success && llt.rcond() > kGramTol) return llt.solve(rhs);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
    const Vector& ev = eig.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    if (!(top > 0) || ev.minCoeff() <= kGramTol * top) {
        throw IllConditionedError("active Gram matrix is singular (collinear covariates)");
    }
    Vector inv = Vector::Zero(ev.size());
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > kGramTol * top) inv(i) = 1.0 / ev(i);
    }
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose() * rhs;
}

std::vector<LarStep> lar_path(const Dictionary& dict, const Vector& y, int max_steps,
                              bool lasso_mode) {
    const Matrix& X = dict.covariates;
    const Index p = X.rows();
    const Index n_cov = X.cols();
    if (n_cov == 0) throw ArgumentError("lar_path: empty dictionary");
    if (y.size() != p) throw DimensionError("lar_path: response length differs from covariate length");
    if (max_steps < 1) throw ArgumentError("lar_path: max_steps must be >= 1");
    if (!lasso_mode && max_steps > n_cov) {
        throw ArgumentError("lar_path: max_steps exceeds dictionary size");
    }
    require_finite(X, "lar_path");

    Vector scale = X.colwise().norm().transpose();
    for (Index k = 0; k < n_cov; ++k) {
        if (dict.normalized && std::abs(scale(k) - 1.0) > 1e-10) {
            throw ArgumentError("lar_path: column " + std::to_string(k) +
                                " is flagged normalized but has norm " + std::to_string(scale(k)));
        }
        if (!(scale(k) > 0)) throw ArgumentError("lar_path: zero covariate column");
    }
    if (dict.normalized) scale.setOnes();
    const Matrix Xn = X * scale.cwiseInverse().asDiagonal();

    std::vector<LarStep> path;
    Vector sigma = Vector::Zero(n_cov);
    Vector fitted = Vector::Zero(p);

    Vector c = Xn.transpose() * y;
    Index first = 0;
    // Index-order scan with strict comparison: lowest index wins ties.
    for (Index k = 1; k < n_cov; ++k) {
        if (std::abs(c(k)) > std::abs(c(first))) first = k;
    }
    if (std::abs(c(first)) == 0.0) return path;

    std::vector<Index> active{first};
    Index just_dropped = -1;
    const double y_norm = y.norm();

    for (int step = 0; step < max_steps; ++step) {
        const Vector residual = y - fitted;
        c = Xn.transpose() * residual;
        double C = 0.0;
        for (Index k : active) C = std::max(C, std::abs(c(k)));
        if (C <= 1e-14 * std::max(1.0, y_norm)) break;

        const auto na = static_cast<Index>(active.size());
        Vector signs(na);
        Matrix XA(p, na);
        for (Index i = 0; i < na; ++i) {
            signs(i) = c(active[i]) >= 0 ? 1.0 : -1.0;
            XA.col(i) = signs(i) * Xn.col(active[i]);
        }
        const Vector chi = solve_gram(XA.transpose() * XA, Vector::Ones(na));
        const Vector zeta = XA * chi;
        const Vector a = Xn.transpose() * zeta;

        double eta = std::numeric_limits<double>::infinity();
        std::optional<Index> entering;
        for (Index k = 0; k < n_cov; ++k) {
            if (contains(active, k) || just_dropped == k) continue;
            for (double sgn : {-1.0, 1.0}) {
                const double den = 1.0 + sgn * a(k);
                const double val = (C + sgn * c(k)) / den;
                if (den > 0 && val > 0 && val < eta) {
                    eta = val;
                    entering = k;
                }
            }
        }
        if (!entering || eta > C) {
            // No covariate left to join: finish at the least-squares fit on the active set.
            eta = C;
            entering.reset();
        }

        std::optional<Index> dropping;
        if (lasso_mode) {
            for (Index i = 0; i < na; ++i) {
                const double dir = signs(i) * chi(i);
                const double gamma = -sigma(active[i]) / dir;
                if (dir != 0.0 && gamma > 1e-14 && gamma < eta) {
                    eta = gamma;
                    dropping = active[i];
                }
            }
        }

        fitted += eta * zeta;
        for (Index i = 0; i < na; ++i) sigma(active[i]) += eta * signs(i) * chi(i);

        LarStep rec;
        rec.step = eta;
        rec.weights = chi;
        if (dropping) {
            sigma(*dropping) = 0.0;
            active.erase(std::find(active.begin(), active.end(), *dropping));
            just_dropped = *dropping;
            rec.dropped = dropping;
        } else {
            just_dropped = -1;
            if (entering) {
                active.push_back(*entering);
                rec.entered = entering;
            }
        }
        rec.active = active;
        rec.coefficients = sigma.cwiseQuotient(scale);
        rec.residual_norm = (y - fitted).norm();
        rec.correlation = C - eta;
        path.push_back(std::move(rec));

        if (!dropping && !entering) break;
        if (active.empty()) break;
    }
    return path;
}

}  // namespace lowrank

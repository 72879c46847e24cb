#include <doctest.h>

#include <cmath>
#include <random>

#include "lowrank/errors.hpp"
#include "lowrank/matrix_core.hpp"
#include "test_support.hpp"

using namespace lowrank;
using testing_support::gaussian;
using testing_support::max_abs_diff;

TEST_CASE("hankel_map small examples") {
    Sequence s(3);
    s << 1, 2, 3;
    const Matrix H = hankel_map(s, HankelSpec::make(2, 2));
    Matrix expect(2, 2);
    expect << 1, 2, 2, 3;
    CHECK(H == expect);

    CHECK(hankel_map(Sequence::Zero(5), HankelSpec::make(3, 3)).isZero(0.0));
    CHECK_THROWS_AS(hankel_map(s, HankelSpec::make(3, 3)), DimensionError);
    CHECK_THROWS_AS(HankelSpec::make(0, 2), ArgumentError);
}

TEST_CASE("geometric sequence gives a rank-one Hankel matrix") {
    Sequence s(5);
    for (Index k = 0; k < 5; ++k) s(k) = std::pow(0.5, static_cast<double>(k));
    const Matrix H = hankel_map(s, HankelSpec::make(3, 3));
    const Vector sv = Eigen::JacobiSVD<Matrix>(H).singularValues();
    CHECK(sv(1) < 1e-12 * sv(0));
    CHECK(numerical_rank(H) == 1);
}

TEST_CASE("anti-diagonal averaging") {
    Sequence s(3);
    s << 1, 2, 3;
    CHECK(hankel_adjoint_average(hankel_map(s, HankelSpec::make(2, 2))) == s);

    Matrix M(2, 2);
    M << 0, 2, 0, 0;
    const Sequence avg = hankel_adjoint_average(M);
    REQUIRE(avg.size() == 3);
    CHECK(avg(0) == 0.0);
    CHECK(avg(1) == doctest::Approx(1.0));
    CHECK(avg(2) == 0.0);
}

TEST_CASE("averaging is the least-squares Hankel fit") {
    std::mt19937_64 rng(11);
    const Matrix M = gaussian(rng, 4, 3);
    const HankelSpec spec = HankelSpec::make(4, 3);
    const Sequence s = hankel_adjoint_average(M);
    // Separable problem: each anti-diagonal is fitted by a constant.
    Sequence oracle = Sequence::Zero(6);
    Vector count = Vector::Zero(6);
    for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 3; ++j) {
            oracle(i + j) += M(i, j);
            count(i + j) += 1.0;
        }
    }
    oracle = oracle.cwiseQuotient(count);
    CHECK((s - oracle).cwiseAbs().maxCoeff() < 1e-14);

    const double best = (hankel_map(s, spec) - M).norm();
    for (int t = 0; t < 50; ++t) {
        const Sequence other = s + 0.1 * gaussian(rng, 6, 1);
        CHECK((hankel_map(other, spec) - M).norm() >= best);
    }
}

TEST_CASE("round trip, linearity and adjoint identity on random sequences") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const Index m = 1 + static_cast<Index>(rng() % 7);
        const Index n = 1 + static_cast<Index>(rng() % 7);
        const HankelSpec spec = HankelSpec::make(m, n);
        const Sequence x = gaussian(rng, spec.length(), 1);
        const Sequence y = gaussian(rng, spec.length(), 1);
        CHECK((hankel_adjoint_average(hankel_map(x, spec)) - x).cwiseAbs().maxCoeff() < 1e-15);

        const double a = 1.7, b = -0.3;
        CHECK(max_abs_diff(hankel_map(a * x + b * y, spec),
                           a * hankel_map(x, spec) + b * hankel_map(y, spec)) < 1e-14);

        const Matrix M = gaussian(rng, m, n);
        CHECK(frob_inner(hankel_map(x, spec), M) == doctest::Approx(x.dot(hankel_adjoint_sum(M))));

        const Vector counts = hankel_diagonal_counts(spec);
        CHECK(counts.sum() == doctest::Approx(static_cast<double>(m * n)));
        CHECK((hankel_adjoint_sum(Matrix::Ones(m, n)) - counts).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("HankelSpec::from_length") {
    const HankelSpec spec = HankelSpec::from_length(99, 80);
    CHECK(spec.rows == 80);
    CHECK(spec.cols == 20);
    CHECK_THROWS_AS(HankelSpec::from_length(5, 6), ArgumentError);
}

TEST_CASE("svd small examples") {
    const SvdFactors I = svd(Matrix::Identity(3, 3));
    CHECK((I.S - Vector::Ones(3)).cwiseAbs().maxCoeff() < 1e-15);

    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 1;
    D(1, 1) = 3;
    const SvdFactors f = svd(D);
    CHECK(f.S(0) == doctest::Approx(3.0));
    CHECK(f.S(1) == doctest::Approx(1.0));
}

TEST_CASE("svd factor invariants on random matrices") {
    std::mt19937_64 rng(3);
    for (auto [r, c] : {std::pair<Index, Index>{5, 4}, {4, 5}, {7, 7}, {1, 3}}) {
        const Matrix M = gaussian(rng, r, c);
        const SvdFactors f = svd(M);
        const Index k = std::min(r, c);
        REQUIRE(f.S.size() == k);
        for (Index i = 1; i < k; ++i) CHECK(f.S(i) <= f.S(i - 1));
        CHECK(f.S.minCoeff() >= 0.0);
        CHECK(max_abs_diff(f.U.transpose() * f.U, Matrix::Identity(k, k)) < 1e-10);
        CHECK(max_abs_diff(f.V.transpose() * f.V, Matrix::Identity(k, k)) < 1e-10);
        CHECK((f.reconstruct() - M).norm() < 1e-8 * M.norm());
    }
    Matrix bad = Matrix::Ones(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS(svd(bad));
}

TEST_CASE("frob_inner") {
    CHECK(frob_inner(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) == 2.0);
    std::mt19937_64 rng(8);
    const Matrix A = gaussian(rng, 4, 3), B = gaussian(rng, 4, 3);
    CHECK(frob_inner(A, Matrix::Zero(4, 3)) == 0.0);
    CHECK(frob_inner(A, B) == doctest::Approx((A.transpose() * B).trace()).epsilon(1e-12));
    CHECK(frob_inner(A, A) == doctest::Approx(A.squaredNorm()).epsilon(1e-14));
    CHECK_THROWS_AS(frob_inner(A, Matrix::Zero(3, 4)), DimensionError);
}

TEST_CASE("numerical_rank") {
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 3;
    D(1, 1) = 1;
    CHECK(numerical_rank(D, 1e-6) == 2);
    CHECK(numerical_rank(Matrix::Zero(4, 3)) == 0);
    CHECK_THROWS_AS(numerical_rank(D, 0.0), ArgumentError);

    // Sixth-order impulse response: three damped cosines.
    const HankelSpec spec = HankelSpec::make(30, 20);
    Sequence g(spec.length());
    for (Index k = 0; k < g.size(); ++k) {
        const double kk = static_cast<double>(k);
        g(k) = std::pow(0.85, kk) * std::cos(2.3 * kk + 0.1) + std::pow(0.92, kk) * std::cos(0.2 * kk - 1.0) +
               std::pow(0.9, kk) * std::cos(1.35 * kk - 2.4);
    }
    CHECK(numerical_rank(hankel_map(g, spec), 1e-8) == 6);
}

TEST_CASE("difference-equation sequences have Hankel rank at most the order") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        const int r = 1 + static_cast<int>(rng() % 5);
        // Characteristic roots inside the unit disc keep the sequence bounded.
        Eigen::VectorXcd poly = Eigen::VectorXcd::Zero(r + 1);
        poly(0) = 1.0;
        for (int i = 0; i < r; ++i) {
            const double root = testing_support::uniform(rng, -0.95, 0.95);
            for (int j = i + 1; j >= 1; --j) poly(j) -= root * poly(j - 1);
        }
        const Vector a = poly.real();  // x_{k+r} = -sum_{i} a_{r-i} x_{k+i}
        const HankelSpec spec = HankelSpec::make(12, 10);
        Sequence x(spec.length());
        for (int k = 0; k < r; ++k) x(k) = testing_support::uniform(rng, -1, 1);
        for (Index k = r; k < x.size(); ++k) {
            double v = 0.0;
            for (int i = 1; i <= r; ++i) v -= a(i) * x(k - i);
            x(k) = v;
        }
        CHECK(numerical_rank(hankel_map(x, spec), 1e-8) <= r);
    }
}

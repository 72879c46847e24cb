#include "lowrank/hankel_atoms.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2d rotation_generator() {
    Eigen::Matrix2d J;
    J << 0.0, -1.0, 1.0, 0.0;
    return J;
}

}  // namespace

bool PoleAtom::is_real() const noexcept {
    return angle < kRealAngleTol || kPi - angle < kRealAngleTol;
}

double wrap_phase(double psi) {
    double w = std::remainder(psi, 2.0 * kPi);  // [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

PoleAtom make_atom(double modulus, double angle, double phase) {
    if (!(modulus >= 0) || !std::isfinite(modulus)) throw ArgumentError("PoleAtom: modulus must be >= 0");
    if (!(angle >= 0 && angle <= kPi)) {
        throw ArgumentError("PoleAtom: angle " + std::to_string(angle) + " outside [0, pi]");
    }
    if (!std::isfinite(phase)) throw ArgumentError("PoleAtom: non-finite phase");
    return PoleAtom{modulus, angle, wrap_phase(phase)};
}

PoleAtom negated(const PoleAtom& a) { return PoleAtom{a.modulus, a.angle, wrap_phase(a.phase + kPi)}; }

Sequence atom_sequence(const PoleAtom& a, Index N) {
    if (N < 1) throw ArgumentError("atom_sequence: N must be >= 1");
    Sequence xi(N);
    double power = 1.0;
    for (Index k = 0; k < N; ++k) {
        xi(k) = power * std::cos(a.phase + static_cast<double>(k) * a.angle);
        power *= a.modulus;
    }
    return xi;
}

Matrix atom_matrix(const PoleAtom& a, const HankelSpec& spec) {
    return hankel_map(atom_sequence(a, spec.length()), spec);
}

PoleBasis pole_basis(double modulus, double angle, const HankelSpec& spec) {
    const Index len = std::max(spec.rows, spec.cols);
    Matrix cs(len, 2);
    double power = 1.0;
    for (Index k = 0; k < len; ++k) {
        const double t = static_cast<double>(k) * angle;
        cs(k, 0) = power * std::cos(t);
        cs(k, 1) = power * std::sin(t);
        power *= modulus;
    }
    PoleBasis b;
    b.U = cs.topRows(spec.rows);
    b.U.col(1) *= -1.0;
    b.V = cs.topRows(spec.cols);
    return b;
}

Eigen::Matrix2d phase_rotation(double phase) {
    Eigen::Matrix2d R;
    const double c = std::cos(phase), s = std::sin(phase);
    R << c, -s, s, c;
    return R;
}

AtomFactors atom_factors(const PoleAtom& a, const HankelSpec& spec) {
    PoleBasis b = pole_basis(a.modulus, a.angle, spec);
    return AtomFactors{std::move(b.U), phase_rotation(a.phase), std::move(b.V)};
}

double atom_inner(const PoleAtom& a, const HankelSpec& spec, const Matrix& W) {
    if (W.rows() != spec.rows || W.cols() != spec.cols) {
        throw DimensionError("atom_inner: W must be rows x cols of the Hankel spec");
    }
    const AtomFactors f = atom_factors(a, spec);
    const Eigen::Matrix2d M = f.U.transpose() * W * f.V;
    return (M * f.R.transpose()).trace();
}

AtomNorm atom_opnorm(const PoleAtom& a, const HankelSpec& spec, const Matrix& G) {
    if (G.rows() != spec.rows || G.cols() != spec.rows) {
        throw DimensionError("atom_opnorm: G must be rows x rows of the Hankel spec");
    }
    const AtomFactors f = atom_factors(a, spec);
    const Eigen::Matrix2d A = f.U.transpose() * G * f.U;
    const Eigen::Matrix2d B = f.V.transpose() * f.V;
    const double sq = (f.R.transpose() * A * f.R * B).trace();
    // Scale of the phase-independent quadratic form; used to detect a null atom.
    const double scale = (A * B).trace() + (rotation_generator().transpose() * A * rotation_generator() * B).trace();
    AtomNorm out;
    out.value = std::sqrt(std::max(sq, 0.0));
    out.degenerate = !(sq > 1e-20 * scale) || out.value == 0.0;
    return out;
}

PhaseProfile phase_profile(const PoleBasis& basis, const std::vector<const Matrix*>& Ws,
                           const Matrix& G) {
    PhaseProfile prof;
    prof.inner.reserve(Ws.size());
    for (const Matrix* W : Ws) {
        const Eigen::Matrix2d M = basis.U.transpose() * (*W) * basis.V;
        prof.inner.emplace_back(M(0, 0) + M(1, 1), M(1, 0) - M(0, 1));
    }
    const Eigen::Matrix2d A =
        G.size() == 0 ? Eigen::Matrix2d(basis.U.transpose() * basis.U)
                      : Eigen::Matrix2d(basis.U.transpose() * G * basis.U);
    const Eigen::Matrix2d B = basis.V.transpose() * basis.V;
    const Eigen::Matrix2d J = rotation_generator();
    const Eigen::Matrix2d AB = A * B;
    const double cross = 0.5 * ((J.transpose() * AB).trace() + (A * J * B).trace());
    prof.gram << AB.trace(), cross, cross, (J.transpose() * A * J * B).trace();
    return prof;
}

Eigen::Matrix2d psd_pinv(const Eigen::Matrix2d& Q) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig;
    eig.computeDirect(Q);
    const Eigen::Vector2d ev = eig.eigenvalues();
    const double top = std::max(std::abs(ev(0)), std::abs(ev(1)));
    Eigen::Vector2d inv = Eigen::Vector2d::Zero();
    for (int i = 0; i < 2; ++i) {
        if (ev(i) > 1e-12 * top) inv(i) = 1.0 / ev(i);
    }
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

std::pair<double, double> best_phase(const Eigen::Vector2d& g, const Eigen::Matrix2d& Q) {
    const Eigen::Vector2d v = psd_pinv(Q) * g;
    const double sq = g.dot(v);
    if (!(sq > 0)) return {0.0, 0.0};
    return {std::sqrt(sq), std::atan2(v(1), v(0))};
}

Synthesis synthesize(const std::vector<PoleAtom>& atoms, const std::vector<double>& coeffs,
                     const HankelSpec& spec) {
    if (atoms.size() != coeffs.size()) throw DimensionError("synthesize: atoms and coefficients differ in length");
    Sequence seq = Sequence::Zero(spec.length());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        seq += coeffs[i] * atom_sequence(atoms[i], spec.length());
    }
    Matrix mat = hankel_map(seq, spec);
    return Synthesis{std::move(seq), std::move(mat)};
}

}  // namespace lowrank

#pragma once

#include <complex>
#include <vector>

#include "lowrank/matrix_core.hpp"

namespace lowrank {

/// Angles closer than this to 0 or pi are treated as a real pole.
inline constexpr double kRealAngleTol = 1e-6;

/// Real-valued Hankel mode xi_k = |z|^(k-1) cos(psi + (k-1) theta).
///
/// angle lies in [0, pi]; phase is kept in (-pi, pi].
struct PoleAtom {
    double modulus = 0.0;
    double angle = 0.0;
    double phase = 0.0;

    [[nodiscard]] std::complex<double> pole() const { return std::polar(modulus, angle); }
    [[nodiscard]] bool is_real() const noexcept;
    /// 1 for a real pole, 2 for a complex-conjugate pair.
    [[nodiscard]] int rank_contribution() const noexcept { return is_real() ? 1 : 2; }

    friend bool operator==(const PoleAtom&, const PoleAtom&) = default;
};

/// Wraps an angle into (-pi, pi].
double wrap_phase(double psi);

/// Validates angle in [0, pi] and modulus >= 0; wraps the phase.
PoleAtom make_atom(double modulus, double angle, double phase);

/// The atom with phase psi + pi, i.e. the negated matrix.
PoleAtom negated(const PoleAtom& a);

Sequence atom_sequence(const PoleAtom& a, Index N);
Matrix atom_matrix(const PoleAtom& a, const HankelSpec& spec);

/// X = U R V^T with U (m x 2), R a rotation by psi, V (n x 2).
struct AtomFactors {
    Matrix U;
    Eigen::Matrix2d R;
    Matrix V;

    [[nodiscard]] Matrix product() const { return U * R * V.transpose(); }
};

/// Phase-independent part of the factorization for the pole (modulus, angle).
struct PoleBasis {
    Matrix U;  // m x 2: |z|^k cos(k theta), -|z|^k sin(k theta)
    Matrix V;  // n x 2: |z|^k cos(k theta), +|z|^k sin(k theta)
};

PoleBasis pole_basis(double modulus, double angle, const HankelSpec& spec);
Eigen::Matrix2d phase_rotation(double phase);
AtomFactors atom_factors(const PoleAtom& a, const HankelSpec& spec);

/// <Phi X, Gamma>_F = tr(U^T W V R^T) with W = Phi^T Gamma (m x n).
double atom_inner(const PoleAtom& a, const HankelSpec& spec, const Matrix& W);

struct AtomNorm {
    double value = 0.0;
    bool degenerate = false;
};

/// ||Phi X||_F = sqrt(tr(R^T U^T G U R V^T V)) with G = Phi^T Phi (m x m).
AtomNorm atom_opnorm(const PoleAtom& a, const HankelSpec& spec, const Matrix& G);

/// Frobenius quantities of a pole as functions of the phase.
///
/// With w = (cos psi, sin psi): <Phi X, Gamma_j> = inner[j] . w and
/// ||Phi X||_F^2 = w^T gram w.
struct PhaseProfile {
    std::vector<Eigen::Vector2d> inner;
    Eigen::Matrix2d gram = Eigen::Matrix2d::Zero();
};

/// Reduced 2x2 forms of the pole against each W_j = Phi^T Gamma_j.
/// `G` may be empty to mean Phi = I.
PhaseProfile phase_profile(const PoleBasis& basis, const std::vector<const Matrix*>& Ws,
                           const Matrix& G);

/// Pseudo-inverse of a symmetric positive semidefinite 2x2 matrix.
Eigen::Matrix2d psd_pinv(const Eigen::Matrix2d& Q);

/// max over psi of (g . w) / sqrt(w^T Q w) = sqrt(g^T Q^+ g), attained at
/// w proportional to Q^+ g. Returns {value, phase}.
std::pair<double, double> best_phase(const Eigen::Vector2d& g, const Eigen::Matrix2d& Q);

struct Synthesis {
    Sequence sequence;
    Matrix matrix;
};

/// sum_i coeffs[i] * atom_i as a sequence and as its Hankel matrix.
Synthesis synthesize(const std::vector<PoleAtom>& atoms, const std::vector<double>& coeffs,
                     const HankelSpec& spec);

}  // namespace lowrank

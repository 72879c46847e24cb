#include "lowrank/hankel_lar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "lowrank/atom_search.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/finite_lar.hpp"
#include "lowrank/unstructured_lar.hpp"

namespace lowrank {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kRealSnapTol = 1e-9;

double snap_angle(double theta) {
    if (theta < kRealAngleTol) return 0.0;
    if (kPi - theta < kRealAngleTol) return kPi;
    return theta;
}

bool inside_exclusion(double modulus, double angle, const std::vector<PoleAtom>& exclusion,
                      double separation) {
    const std::complex<double> z = std::polar(modulus, angle);
    return std::any_of(exclusion.begin(), exclusion.end(),
                       [&](const PoleAtom& e) { return std::abs(z - e.pole()) < separation; });
}

struct SearchDomain {
    PoleGrid grid;
    Box2 box;
    Eigen::Vector2d step;
};

SearchDomain make_domain(const HankelSolverOptions& opts) {
    const double cap = opts.stable ? 1.0 : opts.modulus_cap;
    SearchDomain d;
    d.grid = make_pole_grid(opts.modulus_points, opts.angle_points, cap);
    d.box = Box2{Eigen::Vector2d(1e-6 * cap, 0.0), Eigen::Vector2d(cap, kPi)};
    d.step = Eigen::Vector2d(0.5 * cap / opts.modulus_points, 0.5 * kPi / (opts.angle_points - 1));
    return d;
}

template <class F>
double golden_section(F&& f, double lo, double hi, double tol) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

/// Grid evaluation followed by simplex refinement from the best local minima.
/// Refinement runs on the objective without the separation constraint; a run
/// that ends outside every exclusion ball with a value above `floor` is a
/// stationary point with no active inequality and is preferred. Runs that slide
/// into a ball or down to the floor would only settle on a constraint boundary,
/// so the constrained optimum is used only when no start yields such a point.
template <class Objective>
SimplexResult minimize_over_poles(const SearchDomain& dom, const HankelSolverOptions& opts,
                                  const std::vector<PoleAtom>& exclusion, double floor, Objective&& f) {
    const auto excluded = [&](double modulus, double angle) {
        return inside_exclusion(modulus, snap_angle(angle), exclusion, opts.separation);
    };
    const auto constrained = [&](double modulus, double angle) {
        return excluded(modulus, angle) ? kInf : f(modulus, angle);
    };
    const std::vector<double> values =
        opts.parallel ? evaluate_grid(dom.grid, constrained) : evaluate_grid_serial(dom.grid, constrained);
    const std::vector<std::size_t> starts =
        local_minima(dom.grid, values, static_cast<std::size_t>(std::max(opts.refine_starts, 1)));
    SimplexResult best;
    best.value = kInf;
    if (starts.empty()) return best;

    const auto free_obj = [&](const Eigen::Vector2d& x) { return f(x(0), x(1)); };
    for (std::size_t s : starts) {
        const SimplexResult r = nelder_mead_2d(free_obj, dom.grid.point(s), dom.step, dom.box,
                                               opts.refine_tol, opts.max_refine_iters);
        if (!excluded(r.x(0), r.x(1)) && r.value > floor && r.value < best.value) best = r;
    }
    if (!std::isfinite(best.value)) {
        best.x = dom.grid.point(starts.front());
        best.value = values[starts.front()];
        const auto con_obj = [&](const Eigen::Vector2d& x) { return constrained(x(0), x(1)); };
        for (std::size_t s : starts) {
            const SimplexResult r = nelder_mead_2d(con_obj, dom.grid.point(s), dom.step, dom.box,
                                                   opts.refine_tol, opts.max_refine_iters);
            if (r.value < best.value) best = r;
        }
    }

    // Near the real axis the phase Gram is almost singular and rounding hides the
    // loss of a small imaginary part; take the real pole when it is as good.
    for (double axis : {0.0, kPi}) {
        if (!std::isfinite(best.value) || std::abs(best.x(1) - axis) > 2.0 * dom.step(1)) continue;
        if (best.x(1) == axis || excluded(best.x(0), axis)) continue;
        const double v = f(best.x(0), axis);
        if (v > floor && v <= best.value + kRealSnapTol * std::abs(best.value)) {
            best.x(1) = axis;
            best.value = v;
            const auto on_axis = [&](double modulus) {
                return excluded(modulus, axis) ? kInf : f(modulus, axis);
            };
            const double lo = std::max(dom.box.lo(0), best.x(0) - 2.0 * dom.step(0));
            const double hi = std::min(dom.box.hi(0), best.x(0) + 2.0 * dom.step(0));
            const double m = golden_section(on_axis, lo, hi, opts.refine_tol);
            const double vm = on_axis(m);
            if (vm > floor && vm < best.value) {
                best.x(0) = m;
                best.value = vm;
            }
        }
    }
    return best;
}

PhaseProfile profile_at(const HankelRegression& problem, double modulus, double angle,
                        const std::vector<const Matrix*>& Ws) {
    return phase_profile(pole_basis(modulus, angle, problem.spec()), Ws, problem.gram());
}

struct EntryStep {
    double step = kInf;
    double phase = 0.0;
};

/// Smallest eta in [0, level] with max_psi <A(psi), residual - eta Z> / ||A(psi)|| = level - eta.
/// Squaring gives a quadratic in eta built from the pseudo-inverse of the phase Gram.
EntryStep entry_step(const PhaseProfile& prof, double level) {
    const Eigen::Matrix2d Qp = psd_pinv(prof.gram);
    const Eigen::Vector2d& p = prof.inner[0];
    const Eigen::Vector2d& q = prof.inner[1];
    const double P = p.dot(Qp * p), R = p.dot(Qp * q), S = q.dot(Qp * q);
    const double a = S - 1.0, b = 2.0 * (level - R), c0 = P - level * level;

    EntryStep out;
    double eta = kInf;
    if (c0 >= 0.0) {
        // Already at (or above) the active level: ties join immediately, anything
        // clearly above would contradict the previous selection and is skipped.
        if (c0 <= 1e-12 * level * level) eta = 0.0;
    } else {
        std::array<double, 2> roots{kInf, kInf};
        if (std::abs(a) <= 1e-14 * (std::abs(b) + std::abs(c0))) {
            if (b != 0.0) roots[0] = -c0 / b;
        } else {
            const double disc = b * b - 4.0 * a * c0;
            if (disc >= 0.0) {
                const double qq = -0.5 * (b + std::copysign(std::sqrt(disc), b));
                roots[0] = qq / a;
                if (qq != 0.0) roots[1] = c0 / qq;
            }
        }
        for (double r : roots) {
            if (r >= 0.0 && r <= level * (1.0 + 1e-12) && r < eta) eta = r;
        }
        eta = std::min(eta, level);
    }
    if (!std::isfinite(eta)) return out;
    out.step = eta;
    const Eigen::Vector2d v = Qp * (p - eta * q);
    out.phase = std::atan2(v(1), v(0));
    return out;
}

double profile_correlation(const Eigen::Vector2d& inner, const Eigen::Matrix2d& gram, double phase) {
    const Eigen::Vector2d w(std::cos(phase), std::sin(phase));
    const double sq = w.dot(gram * w);
    if (!(sq > 1e-20 * gram.trace())) return std::numeric_limits<double>::quiet_NaN();
    return inner.dot(w) / std::sqrt(sq);
}

}  // namespace

void HankelSolverOptions::validate() const {
    if (rank_budget < 0) throw ArgumentError("rank budget must be >= 0");
    if (!(separation > 0)) throw ArgumentError("separation epsilon must be positive");
    if (angle_points < 2 || modulus_points < 2) throw ArgumentError("grid densities must be >= 2");
    if (!stable && !(modulus_cap > 0)) throw ArgumentError("modulus cap must be positive");
    if (!(refine_tol > 0)) throw ArgumentError("refinement tolerance must be positive");
    if (max_iterations < 1) throw ArgumentError("max_iterations must be >= 1");
}

HankelRegression::HankelRegression(Matrix Y, Matrix Phi, HankelSpec spec)
    : Y_(std::move(Y)), Phi_(std::move(Phi)), spec_(spec) {
    if (Phi_.cols() != spec_.rows) throw DimensionError("Hankel regression: Phi must have m = rows columns");
    if (Y_.rows() != Phi_.rows()) throw DimensionError("Hankel regression: Y and Phi row counts differ");
    if (Y_.cols() != spec_.cols) throw DimensionError("Hankel regression: Y must have n = cols columns");
    require_finite(Y_, "Hankel regression");
    require_finite(Phi_, "Hankel regression");
    identity_ = Phi_.rows() == Phi_.cols() && Phi_.isIdentity(0.0);
    if (!identity_) {
        require_full_column_rank(Phi_);
        G_ = Phi_.transpose() * Phi_;
    }
}

Matrix HankelRegression::adjoint(const Matrix& Gamma) const {
    if (identity_) return Gamma;
    return Phi_.transpose() * Gamma;
}

Matrix HankelRegression::image(const PoleAtom& a) const {
    Matrix X = atom_matrix(a, spec_);
    if (identity_) return X;
    return Phi_ * X;
}

Matrix HankelRegression::dense_gram() const {
    if (identity_) return Matrix::Identity(spec_.rows, spec_.rows);
    return G_;
}

void ActiveSet::add(const PoleAtom& a, Matrix image) {
    const auto k = static_cast<Index>(atoms.size());
    Matrix g(k + 1, k + 1);
    if (k > 0) g.topLeftCorner(k, k) = gram;
    for (Index i = 0; i < k; ++i) {
        const double v = frob_inner(images[static_cast<std::size_t>(i)], image);
        g(i, k) = v;
        g(k, i) = v;
    }
    g(k, k) = image.squaredNorm();
    gram = std::move(g);
    atoms.push_back(a);
    coefficients.push_back(0.0);
    norms.push_back(image.norm());
    images.push_back(std::move(image));
}

int ActiveSet::consumed_rank() const {
    int r = 0;
    for (const PoleAtom& a : atoms) r += a.rank_contribution();
    return r;
}

double correlation(const PoleAtom& a, const HankelRegression& problem, const Matrix& W) {
    const PhaseProfile prof = profile_at(problem, a.modulus, a.angle, {&W});
    const double c = profile_correlation(prof.inner[0], prof.gram, a.phase);
    if (std::isnan(c)) throw SearchFailure("correlation: atom has zero norm");
    return c;
}

PoleAtom optimize_atom(const HankelRegression& problem, const Matrix& W,
                       const HankelSolverOptions& opts, const std::vector<PoleAtom>& exclusion) {
    opts.validate();
    if (!opts.finite_dictionary.empty()) {
        double best = -kInf;
        std::optional<PoleAtom> arg;
        for (const PoleAtom& d : opts.finite_dictionary) {
            if (inside_exclusion(d.modulus, d.angle, exclusion, opts.separation)) continue;
            const PhaseProfile prof = profile_at(problem, d.modulus, d.angle, {&W});
            const double c = profile_correlation(prof.inner[0], prof.gram, d.phase);
            if (std::isnan(c)) continue;
            for (double sgn : {1.0, -1.0}) {
                if (sgn * c > best) {
                    best = sgn * c;
                    arg = sgn > 0 ? d : negated(d);
                }
            }
        }
        if (!arg) throw SearchFailure("optimize_atom: every dictionary atom is degenerate or excluded");
        return *arg;
    }

    const SearchDomain dom = make_domain(opts);
    const auto objective = [&](double modulus, double angle) {
        const PhaseProfile prof = profile_at(problem, modulus, snap_angle(angle), {&W});
        return -best_phase(prof.inner[0], prof.gram).first;
    };
    const SimplexResult best = minimize_over_poles(dom, opts, exclusion, -kInf, objective);
    if (!std::isfinite(best.value)) throw SearchFailure("optimize_atom: every grid point is excluded");
    const double angle = snap_angle(best.x(1));
    const PhaseProfile prof = profile_at(problem, best.x(0), angle, {&W});
    return make_atom(best.x(0), angle, best_phase(prof.inner[0], prof.gram).second);
}

EquiangularDirection equiangular_direction(const ActiveSet& active) {
    if (active.size() == 0) throw ArgumentError("equiangular_direction: empty active set");
    const auto k = static_cast<Index>(active.size());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(active.gram);
    const Vector& ev = eig.eigenvalues();
    const double top = ev(k - 1);
    const double bottom = ev(0);
    if (!(bottom > 0) || top / bottom > 1e12) {
        throw IllConditionedError("equiangular_direction: active atoms are nearly collinear "
                                  "(consider a larger separation epsilon)");
    }
    Matrix G = active.gram;
    if (top / bottom > 1e10) G.diagonal().array() += 1e-12 * top;
    const Vector d = Eigen::Map<const Vector>(active.norms.data(), k);
    EquiangularDirection out;
    out.weights = G.ldlt().solve(d);
    out.direction = Matrix::Zero(active.images.front().rows(), active.images.front().cols());
    for (Index i = 0; i < k; ++i) out.direction += out.weights(i) * active.images[static_cast<std::size_t>(i)];
    return out;
}

std::optional<NextAtom> step_to_next_atom(const HankelRegression& problem, const Matrix& residual,
                                          const Matrix& direction, double level,
                                          const ActiveSet& active, const HankelSolverOptions& opts) {
    if (!(level > 1e-13 * std::max(1.0, problem.Y().norm()))) return std::nullopt;
    const Matrix W_res = problem.adjoint(residual);
    const Matrix W_dir = problem.adjoint(direction);
    const std::vector<const Matrix*> Ws{&W_res, &W_dir};

    if (!opts.finite_dictionary.empty()) {
        double eta = kInf;
        std::optional<PoleAtom> arg;
        for (const PoleAtom& d : opts.finite_dictionary) {
            if (inside_exclusion(d.modulus, d.angle, active.atoms, opts.separation)) continue;
            const PhaseProfile prof = profile_at(problem, d.modulus, d.angle, Ws);
            const double c = profile_correlation(prof.inner[0], prof.gram, d.phase);
            const double g = profile_correlation(prof.inner[1], prof.gram, d.phase);
            if (std::isnan(c)) continue;
            for (double sgn : {1.0, -1.0}) {
                const double den = 1.0 - sgn * g;
                const double val = (level - sgn * c) / den;
                if (den > 0 && val > 0 && val < eta) {
                    eta = val;
                    arg = sgn > 0 ? d : negated(d);
                }
            }
        }
        if (!arg || eta > level) return std::nullopt;
        return NextAtom{*arg, eta};
    }

    const SearchDomain dom = make_domain(opts);
    const auto objective = [&](double modulus, double angle) {
        return entry_step(profile_at(problem, modulus, snap_angle(angle), Ws), level).step;
    };
    const SimplexResult best = minimize_over_poles(dom, opts, active.atoms, 1e-9 * level, objective);
    if (!std::isfinite(best.value)) return std::nullopt;
    const double angle = snap_angle(best.x(1));
    const EntryStep es = entry_step(profile_at(problem, best.x(0), angle, Ws), level);
    return NextAtom{make_atom(best.x(0), angle, es.phase), es.step};
}

HankelLarResult run_path(const HankelRegression& problem, const HankelSolverOptions& opts) {
    opts.validate();
    HankelLarResult result;
    result.prediction = Matrix::Zero(problem.Y().rows(), problem.Y().cols());
    if (opts.rank_budget == 0) {
        result.stop = PathStop::EmptyBudget;
        return result;
    }

    const PoleAtom first = optimize_atom(problem, problem.adjoint(problem.Y()), opts, {});
    if (first.rank_contribution() > opts.rank_budget) {
        result.stop = PathStop::ParityMismatch;
        return result;
    }
    ActiveSet& active = result.active;
    active.add(first, problem.image(first));
    result.stop = PathStop::IterationLimit;

    for (int it = 0; it < opts.max_iterations; ++it) {
        const Matrix residual = problem.Y() - result.prediction;
        const double level = frob_inner(active.images.front(), residual) / active.norms.front();
        const EquiangularDirection eq = equiangular_direction(active);
        const std::optional<NextAtom> next =
            step_to_next_atom(problem, residual, eq.direction, level, active, opts);

        // Without a joining atom, move to the least-squares fit on the active set.
        const double eta = next ? next->step : std::max(level, 0.0);
        result.prediction += eta * eq.direction;
        for (std::size_t k = 0; k < active.size(); ++k) {
            active.coefficients[k] += eta * eq.weights(static_cast<Index>(k));
        }

        HankelLarIteration rec;
        rec.step = eta;
        rec.weights = eq.weights;
        rec.direction = eq.direction;
        rec.prediction = result.prediction;
        const Matrix after = problem.Y() - result.prediction;
        rec.residual_norm = after.norm();
        rec.level = level - eta;
        for (std::size_t k = 0; k < active.size(); ++k) {
            rec.active_correlations.push_back(frob_inner(active.images[k], after) / active.norms[k]);
        }
        rec.coefficients = active.coefficients;
        rec.consumed_rank = active.consumed_rank();

        if (!next) {
            result.history.push_back(std::move(rec));
            result.stop = PathStop::ResidualSpanned;
            break;
        }
        const int after_rank = active.consumed_rank() + next->atom.rank_contribution();
        if (after_rank > opts.rank_budget) {
            result.history.push_back(std::move(rec));
            result.stop = after_rank == opts.rank_budget + 1 && next->atom.rank_contribution() == 2
                              ? PathStop::ParityMismatch
                              : PathStop::RankBudget;
            break;
        }
        rec.entered = next->atom;
        result.history.push_back(std::move(rec));
        active.add(next->atom, problem.image(next->atom));
    }
    result.achieved_rank = active.consumed_rank();
    return result;
}

Vector debias(const HankelRegression& problem, const std::vector<PoleAtom>& atoms) {
    if (atoms.empty()) throw ArgumentError("debias: empty atom list");
    const Index rows = problem.Y().size();
    const auto k = static_cast<Index>(atoms.size());
    Matrix D(rows, k);
    for (Index i = 0; i < k; ++i) {
        const Matrix img = problem.image(atoms[static_cast<std::size_t>(i)]);
        if (!(img.norm() > 0)) throw ArgumentError("debias: degenerate atom");
        D.col(i) = img.reshaped();
    }
    const Vector y = problem.Y().reshaped();
    const Matrix normal = D.transpose() * D;
    Eigen::LLT<Matrix> llt(normal);
    if (llt.info() == Eigen::Success && llt.rcond() > 1e-12) return llt.solve(D.transpose() * y);
    return D.completeOrthogonalDecomposition().solve(y);
}

void canonicalize(std::vector<PoleAtom>& atoms, std::vector<double>& coefficients) {
    if (atoms.size() != coefficients.size()) throw DimensionError("canonicalize: length mismatch");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (coefficients[i] < 0) {
            atoms[i] = negated(atoms[i]);
            coefficients[i] = -coefficients[i];
        }
    }
}

}  // namespace lowrank

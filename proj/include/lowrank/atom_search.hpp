#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lowrank {

/// Tensor grid over pole coordinates (modulus, angle).
///
/// Point i has modulus index i % moduli.size() and angle index i / moduli.size().
struct PoleGrid {
    std::vector<double> moduli;
    std::vector<double> angles;

    [[nodiscard]] std::size_t size() const noexcept { return moduli.size() * angles.size(); }
    [[nodiscard]] Eigen::Vector2d point(std::size_t i) const {
        return {moduli[i % moduli.size()], angles[i / moduli.size()]};
    }
};

/// n_modulus points spaced evenly in (0, modulus_cap] (the cap included) and
/// n_angle points spaced evenly in [0, pi] (both ends included).
PoleGrid make_pole_grid(int n_modulus, int n_angle, double modulus_cap);

/// Evaluates f(modulus, angle) on every grid point. Runs in parallel when built
/// with OpenMP; the output order is the grid order regardless of scheduling.
template <class F>
std::vector<double> evaluate_grid(const PoleGrid& grid, F&& f) {
    const auto n = static_cast<long>(grid.size());
    std::vector<double> out(grid.size());
#if defined(LOWRANK_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (long i = 0; i < n; ++i) {
        const Eigen::Vector2d pt = grid.point(static_cast<std::size_t>(i));
        out[static_cast<std::size_t>(i)] = f(pt(0), pt(1));
    }
    return out;
}

/// Serial reference for evaluate_grid.
template <class F>
std::vector<double> evaluate_grid_serial(const PoleGrid& grid, F&& f) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::Vector2d pt = grid.point(i);
        out[i] = f(pt(0), pt(1));
    }
    return out;
}

/// Index of the smallest finite value; lowest index wins ties. Returns
/// grid.size() (i.e. values.size()) when no value is finite.
std::size_t argmin_index(const std::vector<double>& values);

/// Up to `count` grid indices that are no worse than their 8 neighbours,
/// best first (ties by index). The global argmin is always included.
std::vector<std::size_t> local_minima(const PoleGrid& grid, const std::vector<double>& values,
                                      std::size_t count);

struct Box2 {
    Eigen::Vector2d lo;
    Eigen::Vector2d hi;
};

struct SimplexResult {
    Eigen::Vector2d x;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

/// Derivative-free Nelder-Mead minimization of a 2-D function within a box
/// (vertices are clamped to the box). A pass stops when every vertex lies within
/// `tol` of the best one; passes restart from the best vertex until one fails to
/// improve or `max_iters` iterations have been spent in total.
SimplexResult nelder_mead_2d(const std::function<double(const Eigen::Vector2d&)>& f,
                             const Eigen::Vector2d& start, const Eigen::Vector2d& step,
                             const Box2& box, double tol, int max_iters);

}  // namespace lowrank

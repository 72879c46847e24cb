#include "lowrank/atom_search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "lowrank/errors.hpp"

namespace lowrank {

PoleGrid make_pole_grid(int n_modulus, int n_angle, double modulus_cap) {
    if (n_modulus < 2 || n_angle < 2) throw ArgumentError("pole grid densities must be >= 2");
    if (!(modulus_cap > 0)) throw ArgumentError("pole grid modulus cap must be positive");
    PoleGrid g;
    g.moduli.resize(static_cast<std::size_t>(n_modulus));
    g.angles.resize(static_cast<std::size_t>(n_angle));
    for (int i = 0; i < n_modulus; ++i) {
        g.moduli[static_cast<std::size_t>(i)] = modulus_cap * (i + 1) / n_modulus;
    }
    for (int j = 0; j < n_angle; ++j) {
        g.angles[static_cast<std::size_t>(j)] = std::numbers::pi * j / (n_angle - 1);
    }
    g.angles.back() = std::numbers::pi;
    return g;
}

std::size_t argmin_index(const std::vector<double>& values) {
    std::size_t best = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) continue;
        if (best == values.size() || values[i] < values[best]) best = i;
    }
    return best;
}

std::vector<std::size_t> local_minima(const PoleGrid& grid, const std::vector<double>& values,
                                      std::size_t count) {
    const auto nm = static_cast<long>(grid.moduli.size());
    const auto na = static_cast<long>(grid.angles.size());
    std::vector<std::size_t> found;
    for (long ia = 0; ia < na; ++ia) {
        for (long im = 0; im < nm; ++im) {
            const auto idx = static_cast<std::size_t>(ia * nm + im);
            const double v = values[idx];
            if (!std::isfinite(v)) continue;
            bool is_min = true;
            for (long da = -1; da <= 1 && is_min; ++da) {
                for (long dm = -1; dm <= 1; ++dm) {
                    if (da == 0 && dm == 0) continue;
                    const long ja = ia + da, jm = im + dm;
                    if (ja < 0 || ja >= na || jm < 0 || jm >= nm) continue;
                    const double w = values[static_cast<std::size_t>(ja * nm + jm)];
                    if (std::isfinite(w) && w < v) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (is_min) found.push_back(idx);
        }
    }
    std::stable_sort(found.begin(), found.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = argmin_index(values);
    if (best < values.size() && std::find(found.begin(), found.end(), best) == found.end()) {
        found.insert(found.begin(), best);
    }
    if (found.size() > count) found.resize(count);
    return found;
}

namespace {

SimplexResult simplex_pass(const std::function<double(const Eigen::Vector2d&)>& f, const Eigen::Vector2d& start,
                           const Eigen::Vector2d& step, const Box2& box, double tol, int max_iters) {
    const auto clamp = [&](Eigen::Vector2d x) {
        return Eigen::Vector2d(x.cwiseMax(box.lo).cwiseMin(box.hi));
    };
    std::array<Eigen::Vector2d, 3> v{clamp(start), clamp(start + Eigen::Vector2d(step(0), 0.0)),
                                     clamp(start + Eigen::Vector2d(0.0, step(1)))};
    // A vertex clamped onto the start collapses the simplex; step the other way.
    for (int k = 1; k < 3; ++k) {
        if ((v[k] - v[0]).norm() == 0.0) {
            Eigen::Vector2d d = Eigen::Vector2d::Zero();
            d(k - 1) = -step(k - 1);
            v[k] = clamp(start + d);
        }
    }
    std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};

    SimplexResult res;
    int it = 0;
    for (; it < max_iters; ++it) {
        std::array<int, 3> order{0, 1, 2};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        const int best = order[0], mid = order[1], worst = order[2];
        const double spread = std::max((v[mid] - v[best]).norm(), (v[worst] - v[best]).norm());
        if (spread < tol) break;

        const Eigen::Vector2d centroid = 0.5 * (v[best] + v[mid]);
        const Eigen::Vector2d xr = clamp(centroid + (centroid - v[worst]));
        const double fr = f(xr);
        if (fr < fv[best]) {
            const Eigen::Vector2d xe = clamp(centroid + 2.0 * (centroid - v[worst]));
            const double fe = f(xe);
            if (fe < fr) {
                v[worst] = xe;
                fv[worst] = fe;
            } else {
                v[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[mid]) {
            v[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        const Eigen::Vector2d xc = outside ? clamp(centroid + 0.5 * (xr - centroid))
                                           : clamp(centroid + 0.5 * (v[worst] - centroid));
        const double fc = f(xc);
        if (fc < (outside ? fr : fv[worst])) {
            v[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (int k : {mid, worst}) {
            v[k] = clamp(v[best] + 0.5 * (v[k] - v[best]));
            fv[k] = f(v[k]);
        }
    }
    const auto best_it = std::min_element(fv.begin(), fv.end());
    res.x = v[static_cast<std::size_t>(best_it - fv.begin())];
    res.value = *best_it;
    res.iterations = it;
    return res;
}

}  // namespace

SimplexResult nelder_mead_2d(const std::function<double(const Eigen::Vector2d&)>& f,
                             const Eigen::Vector2d& start, const Eigen::Vector2d& step,
                             const Box2& box, double tol, int max_iters) {
    SimplexResult best = simplex_pass(f, start, step, box, tol, max_iters);
    int used = best.iterations;
    for (int restart = 0; restart < 8 && used < max_iters; ++restart) {
        SimplexResult next = simplex_pass(f, best.x, step, box, tol, max_iters - used);
        used += next.iterations;
        if (!(next.value < best.value)) break;
        best = next;
    }
    best.iterations = used;
    return best;
}

}  // namespace lowrank

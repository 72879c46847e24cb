#include <benchmark/benchmark.h>

#include <random>

#include "lowrank/atom_search.hpp"
#include "lowrank/hankel_atoms.hpp"

using namespace lowrank;

namespace {

struct Fixture {
    HankelSpec spec;
    Matrix W;
    Matrix G;

    explicit Fixture(Index m) : spec(HankelSpec::make(m, m)) {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> nd;
        W = Matrix::NullaryExpr(m, m, [&] { return nd(rng); });
        const Matrix Phi = Matrix::NullaryExpr(2 * m, m, [&] { return nd(rng); });
        G = Phi.transpose() * Phi;
    }

    double operator()(double modulus, double angle) const {
        const PoleBasis b = pole_basis(modulus, angle, spec);
        const PhaseProfile prof = phase_profile(b, {&W}, G);
        return -best_phase(prof.inner[0], prof.gram).first;
    }
};

void BM_GridSerial(benchmark::State& state) {
    const Fixture f(state.range(0));
    const PoleGrid grid = make_pole_grid(32, 64, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_grid_serial(grid, f));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

void BM_GridParallel(benchmark::State& state) {
    const Fixture f(state.range(0));
    const PoleGrid grid = make_pole_grid(32, 64, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_grid(grid, f));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

}  // namespace

BENCHMARK(BM_GridSerial)->Arg(10)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Arg(10)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include <hjfb/free_boundary.hpp>
#include <hjfb/solver.hpp>
#include <hjfb/structural_checks.hpp>

using namespace hjfb;

namespace {

constexpr double kPi = std::numbers::pi;

DiscreteProblem manufactured(int n) {
    const Box b(Vec{-1.0}, Vec{1.0});
    const Grid g(b, n);
    const ScalarField f = [](const Vec& x) {
        const double s = std::sin(kPi * x[0]);
        return kPi * kPi * std::cos(kPi * x[0]) + std::pow(1 + kPi * kPi * s * s, 1.5);
    };
    return DiscreteProblem(g, EllipticOperator::negative_trace(1), Hamiltonian::power(b, 1.0, 0.0, 3.0),
                           GridFunction::sample(g, f),
                           GridFunction::sample(g, [](const Vec& x) { return std::cos(kPi * x[0]); }));
}

DiscreteProblem square(int n) {
    const Box b(Vec{-1.0, -1.0}, Vec{1.0, 1.0});
    const Grid g(b, n);
    return DiscreteProblem(g, EllipticOperator::negative_trace(2), Hamiltonian::power(b, 0.5, 0.0, 3.0),
                           GridFunction(g, 1.0), GridFunction(g, 0.0));
}

}  // namespace

static void BM_SymEigen2(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const SymMat m = random_symmetric(2, rng);
    for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(m));
}
BENCHMARK(BM_SymEigen2);

static void BM_SymEigen3(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const SymMat m = random_symmetric(3, rng);
    for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(m));
}
BENCHMARK(BM_SymEigen3);

static void BM_Residual2D(benchmark::State& state) {
    const auto p = square(static_cast<int>(state.range(0)));
    const GridFunction u = GridFunction::sample(p.grid(), [](const Vec& x) { return 0.1 * x[0] * x[1]; });
    for (auto _ : state) benchmark::DoNotOptimize(discrete_residual(p, u));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.grid().node_count()));
}
BENCHMARK(BM_Residual2D)->Arg(64)->Arg(128)->Arg(256);

static void BM_SolveManufactured1D(benchmark::State& state) {
    const auto p = manufactured(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(p, SolveParams{}));
}
BENCHMARK(BM_SolveManufactured1D)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Solve2D(benchmark::State& state) {
    const auto p = square(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(p, SolveParams{}));
}
BENCHMARK(BM_Solve2D)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Mollify2D(benchmark::State& state) {
    const Box b(Vec{-1.0, -1.0}, Vec{1.0, 1.0});
    const Grid g(b, 128);
    const GridFunction v = GridFunction::sample(g, [](const Vec& x) { return x[0] > 0 ? 1.0 : 0.0; });
    for (auto _ : state) benchmark::DoNotOptimize(mollify(v, 0.1));
}
BENCHMARK(BM_Mollify2D)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "twistlab/graphsolve.hpp"
#include "twistlab/tuner.hpp"

using namespace twistlab;

static void BM_Eval(benchmark::State& state) {
    const PeriodicFn f = standard_map_phi(0.2, static_cast<int>(state.range(0)));
    double x = 0.12345;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f(x));
        x += 0.618;
    }
}
BENCHMARK(BM_Eval)->Arg(1024)->Arg(4096);

static void BM_GraphTransform(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const TwistParams p(0.25, 0.38, 0.0, standard_map_phi(0.2, n));
    const PeriodicFn psi = PeriodicFn::zero(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(graph_transform(p, psi));
    }
}
BENCHMARK(BM_GraphTransform)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_Solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const TwistParams p(0.25, 0.38, 0.0, standard_map_phi(0.2, n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(p));
    }
}
BENCHMARK(BM_Solve)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_RotationNumber(benchmark::State& state) {
    const TwistParams p(0.25, 0.38, 0.0, standard_map_phi(0.2, 4096));
    const InvariantGraph g = solve(p);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rotation_number(*g.g, 0.0, state.range(0), 1e-9));
    }
}
BENCHMARK(BM_RotationNumber)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_AttractorOracle(benchmark::State& state) {
    const TwistParams p(0.25, 0.38, 0.0, standard_map_phi(0.2, 4096));
    for (auto _ : state) {
        benchmark::DoNotOptimize(attractor_oracle(p));
    }
}
BENCHMARK(BM_AttractorOracle)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}

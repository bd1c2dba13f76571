#include "hyamabe/certify.hpp"
#include "hyamabe/norms.hpp"
#include "hyamabe/shooting.hpp"
#include "hyamabe/yamabe.hpp"

#include <benchmark/benchmark.h>

using namespace hyamabe;

static void BM_IntegrateNShot(benchmark::State& state) {
    const OdeParams params{-3.0 / 32, 2, 7.0 / 3, false};
    for (auto _ : state) benchmark::DoNotOptimize(integrate(params, 3.0, {}));
}
BENCHMARK(BM_IntegrateNShot);

static void BM_IntegrateToHorizon(benchmark::State& state) {
    const OdeParams params{15.0 / 8, 2, 7.0 / 3, true};
    for (auto _ : state) benchmark::DoNotOptimize(integrate(params, 0.3, {}));
}
BENCHMARK(BM_IntegrateToHorizon);

static void BM_FindGroundState(benchmark::State& state) {
    const OdeParams params{0.75, 2, 7.0 / 3, false};
    for (auto _ : state) benchmark::DoNotOptimize(find_ground_state(params, {}, {}));
}
BENCHMARK(BM_FindGroundState)->Unit(benchmark::kMillisecond);

static void BM_Measure(benchmark::State& state) {
    const GroundState gs = find_ground_state({0.0, 2, 3.0, false}, {}, {});
    for (auto _ : state) benchmark::DoNotOptimize(measure(gs.trajectory, {2, 2}, 1e-12));
}
BENCHMARK(BM_Measure)->Unit(benchmark::kMicrosecond);

static void BM_ComputeQ(benchmark::State& state) {
    const double r = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(compute_q({3, 2}, r));
}
BENCHMARK(BM_ComputeQ)->Arg(1)->Arg(10)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_Certify22(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(certify({2, 2}, 0.99));
}
BENCHMARK(BM_Certify22)->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "eden/growth.hpp"
#include "eden/homology.hpp"

namespace {

void BM_BuildFiltration(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const std::int64_t steps = state.range(1);
    const eden::Trajectory traj = eden::simulate(d, steps, 7, eden::GrowthMode::eden());
    const auto cubes = traj.cubes();
    for (auto _ : state) {
        benchmark::DoNotOptimize(eden::build_filtration(d, cubes));
    }
}
BENCHMARK(BM_BuildFiltration)->Args({2, 20000})->Args({3, 20000})
    ->Unit(benchmark::kMillisecond);

void BM_PersistenceReduction(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const std::int64_t steps = state.range(1);
    const eden::Trajectory traj = eden::simulate(d, steps, 7, eden::GrowthMode::eden());
    const eden::FilteredComplex fc = eden::build_filtration(d, traj.cubes());
    for (auto _ : state) {
        benchmark::DoNotOptimize(eden::persistence(fc));
    }
}
BENCHMARK(BM_PersistenceReduction)->Args({2, 20000})->Args({3, 20000})
    ->Unit(benchmark::kMillisecond);

void BM_Betti(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const std::int64_t steps = state.range(1);
    const eden::Trajectory traj = eden::simulate(d, steps, 7, eden::GrowthMode::eden());
    const eden::Polyomino& p = traj.final_state->occupied();
    for (auto _ : state) {
        benchmark::DoNotOptimize(eden::betti(p));
    }
}
BENCHMARK(BM_Betti)->Args({2, 5000})->Args({3, 2000})->Unit(benchmark::kMillisecond);

}  // namespace

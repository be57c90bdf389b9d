#include <benchmark/benchmark.h>

#include "eden/growth.hpp"
#include "eden/holetrack.hpp"

namespace {

void BM_EdenGrowth(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const std::int64_t steps = state.range(1);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        eden::SimulateOptions opt;
        opt.record_events = false;
        opt.keep_final_state = false;
        eden::simulate(d, steps, seed++, eden::GrowthMode::eden(), {}, opt);
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_EdenGrowth)->Args({2, 100000})->Args({3, 100000})->Args({5, 50000})
    ->Unit(benchmark::kMillisecond);

void BM_EdenGrowthWithHoleTracking(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const std::int64_t steps = state.range(1);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        eden::GrowthState bootstrap(d);
        eden::HoleTracker tracker(bootstrap);
        eden::SimulateOptions opt;
        opt.record_events = false;
        opt.keep_final_state = false;
        eden::simulate(d, steps, seed++, eden::GrowthMode::eden(), {tracker.hook()}, opt);
        benchmark::DoNotOptimize(tracker.hole_count());
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_EdenGrowthWithHoleTracking)->Args({2, 100000})->Args({3, 100000})
    ->Unit(benchmark::kMillisecond);

void BM_SiteFppGrowth(benchmark::State& state) {
    const std::int64_t steps = state.range(0);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        eden::SimulateOptions opt;
        opt.record_events = false;
        opt.keep_final_state = false;
        eden::simulate(2, steps, seed++, eden::GrowthMode::site_fpp(), {}, opt);
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_SiteFppGrowth)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

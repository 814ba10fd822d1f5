// Serial reference vs OpenMP kernels on the three parallel workloads.

#include "seedpower/bootstrap_test.hpp"
#include "seedpower/empirical_error.hpp"
#include "seedpower/power_analysis.hpp"

#include <benchmark/benchmark.h>

using namespace seedpower;

namespace {

Execution mode(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_BootstrapReplicates(benchmark::State& state) {
    const auto pool = draw_pool(SyntheticDistribution::normal(0, 1), 40, 1);
    const auto values = pool.values();
    const BootstrapConfig cfg{static_cast<std::size_t>(state.range(1)), 0.05, 3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(bootstrap_diff_ci(values.first(20), values.subspan(20), cfg, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
    label(state);
}
BENCHMARK(BM_BootstrapReplicates)->ArgsProduct({{0, 1}, {10000, 100000}})->Unit(benchmark::kMillisecond);

void BM_CalibrationTrials(benchmark::State& state) {
    CalibrationConfig cfg;
    cfg.trials = static_cast<std::uint64_t>(state.range(1));
    cfg.group_size = 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(empirical_type1_synthetic(SyntheticDistribution::normal(0, 1), cfg, mode(state)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
    label(state);
}
BENCHMARK(BM_CalibrationTrials)->ArgsProduct({{0, 1}, {10000, 50000}})->Unit(benchmark::kMillisecond);

void BM_BootstrapCalibration(benchmark::State& state) {
    const auto pool = draw_pool(SyntheticDistribution::bimodal(3000, 400, 5000, 400), 42, 0);
    CalibrationConfig cfg;
    cfg.trials = 1000;
    cfg.group_size = 5;
    cfg.test = CalibrationTest::bootstrap;
    for (auto _ : state) benchmark::DoNotOptimize(empirical_type1_from_pool(pool, cfg, mode(state)));
    label(state);
}
BENCHMARK(BM_BootstrapCalibration)->ArgsProduct({{0, 1}})->Unit(benchmark::kMillisecond);

void BM_PowerGrid(benchmark::State& state) {
    std::vector<double> effects;
    for (int k = 1; k <= 10; ++k) effects.push_back(k * 352.3);
    const PowerQuery base{1341, 990, 0.05, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(power_curve(base, 2, static_cast<int>(state.range(1)), effects, mode(state)));
    state.SetItemsProcessed(state.iterations() * (state.range(1) - 1) * 10);
    label(state);
}
BENCHMARK(BM_PowerGrid)->ArgsProduct({{0, 1}, {50, 500}})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

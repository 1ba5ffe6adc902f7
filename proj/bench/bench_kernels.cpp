// Serial reference versus OpenMP kernels on array-sized device batches.

#include "memxbar/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using namespace memxbar;

struct Batch {
    std::vector<DeviceParams> params{DeviceParams{}};
    std::vector<std::size_t> model;
    std::vector<double> v;
    std::vector<DeviceState> states;
    std::vector<double> current;
    std::vector<double> conductance;

    explicit Batch(std::size_t n) : model(n, 0), v(n), states(n), current(n), conductance(n) {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> volts(-7.0, 7.0);
        std::uniform_real_distribution<double> x(1e-6, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = volts(rng);
            states[i] = {x(rng)};
        }
    }
    [[nodiscard]] kernels::DeviceBatch view() const { return {model, params}; }
};

template <bool Parallel>
void BM_Evaluate(benchmark::State& state) {
    Batch b(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::parallel::evaluate(b.view(), b.v, b.states, b.current, b.conductance);
        } else {
            kernels::serial::evaluate(b.view(), b.v, b.states, b.current, b.conductance);
        }
        benchmark::DoNotOptimize(b.current.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Advance(benchmark::State& state) {
    Batch b(static_cast<std::size_t>(state.range(0)));
    const auto start = b.states;
    for (auto _ : state) {
        state.PauseTiming();
        b.states = start;
        state.ResumeTiming();
        if constexpr (Parallel) {
            benchmark::DoNotOptimize(kernels::parallel::advance(b.view(), b.v, 0.05e-9, b.states));
        } else {
            benchmark::DoNotOptimize(kernels::serial::advance(b.view(), b.v, 0.05e-9, b.states));
        }
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

// 64 = one 8x8 tile, 256 = four tiles or a 16x16 crossbar, 8192 = 1 kB.
BENCHMARK(BM_Evaluate<false>)->Arg(64)->Arg(256)->Arg(8192);
BENCHMARK(BM_Evaluate<true>)->Arg(64)->Arg(256)->Arg(8192);
BENCHMARK(BM_Advance<false>)->Arg(64)->Arg(256)->Arg(8192);
BENCHMARK(BM_Advance<true>)->Arg(64)->Arg(256)->Arg(8192);

BENCHMARK_MAIN();

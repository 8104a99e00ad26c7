// Serial reference versus OpenMP kernels. Arg(0) is the serial path; Arg(t)
// for t > 0 runs the parallel kernel with t threads.

#include <benchmark/benchmark.h>

#include "tempest/batch.hpp"
#include "tempest/validation.hpp"

using namespace tempest;

namespace {

const TsSampler& sampler() {
    static const TsSampler s(TsParameters(1.5, 1.0), TuningParameters(0.8));
    return s;
}

void thread_args(benchmark::internal::Benchmark* b) {
    b->Arg(0);
    for (int t = 1; t <= batch::resolve_threads(0); t *= 2) b->Arg(t);
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

void BM_Sample(benchmark::State& state) {
    const int t = static_cast<int>(state.range(0));
    constexpr std::size_t n = 20000;
    for (auto _ : state) {
        auto xs = t == 0 ? batch::sample_serial(sampler(), 1, n) : batch::sample(sampler(), 1, n, t);
        benchmark::DoNotOptimize(xs.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Sample)->Apply(thread_args);

void BM_CountAcceptances(benchmark::State& state) {
    const int t = static_cast<int>(state.range(0));
    constexpr std::uint64_t n = 100000;
    for (auto _ : state) {
        auto r = t == 0 ? batch::count_acceptances_serial(sampler(), 1, n) : batch::count_acceptances(sampler(), 1, n, t);
        benchmark::DoNotOptimize(r.accepted);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CountAcceptances)->Apply(thread_args);

void BM_DominationScan(benchmark::State& state) {
    const int t = static_cast<int>(state.range(0));
    validation::DominationSpec spec;
    spec.grid_x = 300;
    spec.grid_theta = 300;
    spec.quasi_points = 100000;
    const TsParameters p(1.5, 1.0);
    const TuningParameters tu(0.8);
    for (auto _ : state) {
        auto d = t == 0 ? validation::domination_scan_serial(p, tu, spec)
                        : validation::domination_scan(p, tu, spec, std::nullopt, t);
        benchmark::DoNotOptimize(d.max_log_ratio);
    }
}
BENCHMARK(BM_DominationScan)->Apply(thread_args);

}  // namespace

BENCHMARK_MAIN();

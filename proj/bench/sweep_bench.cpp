#include "roamscope/survey.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace roamscope;

namespace {

const ModelParams params;

void BM_FieldSerial(benchmark::State& state)
{
    const SectionSpec s = SectionSpec::radial_section(params, static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_field_serial(params, s, DescriptorSpec::inner(4)));
    state.SetItemsProcessed(state.iterations() * s.n * s.n);
}

void BM_FieldOpenMP(benchmark::State& state)
{
    const SectionSpec s = SectionSpec::radial_section(params, static_cast<int>(state.range(0)));
    const int threads = static_cast<int>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_field(params, s, DescriptorSpec::inner(4), IntegratorSettings::sweep(), threads));
    state.SetItemsProcessed(state.iterations() * s.n * s.n);
    state.counters["threads"] = threads;
}

void thread_args(benchmark::internal::Benchmark* b)
{
    for (int t = 1; t <= omp_get_num_procs(); t *= 2)
        b->Args({32, t});
}

}  // namespace

BENCHMARK(BM_FieldSerial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FieldOpenMP)->Apply(thread_args)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

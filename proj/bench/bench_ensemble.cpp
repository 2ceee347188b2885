// Serial reference kernel against the OpenMP ensemble on the same spec.
// Arguments: chain count, and for the parallel kernel the worker count.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "pdmp/ensemble.hpp"

using namespace pdmp;

namespace {

EnsembleSpec make_spec(const Potential& pot, Process p, std::int64_t chains)
{
    EnsembleSpec spec;
    spec.process = p;
    spec.potential = &pot;
    spec.gamma = 1.0;
    spec.total_time = 10.0;
    spec.init = InitialCondition::fixed_position(Vec(static_cast<std::size_t>(pot.dim()), 2.0));
    spec.grid = uniform_grid(10.0, 0.01);
    spec.observables = {Observable::position(pot.dim(), 0)};
    spec.master_seed = 99;
    spec.n_chains = chains;
    return spec;
}

const Potential& gaussian4()
{
    static const Potential pot = Potential::isotropic_gaussian(4, 1.0);
    return pot;
}

template <Process P>
void serial(benchmark::State& state)
{
    const EnsembleSpec spec = make_spec(gaussian4(), P, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble_serial(spec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Process P>
void parallel(benchmark::State& state)
{
    const EnsembleSpec spec = make_spec(gaussian4(), P, state.range(0));
    const int workers = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(spec, workers));
    state.SetItemsProcessed(state.iterations() * state.range(0));
    state.counters["workers"] = workers;
}

void parallel_args(benchmark::internal::Benchmark* b)
{
    const int max_workers = omp_get_max_threads();
    for (int w = 1; w <= max_workers; w *= 2) b->Args({2048, w});
    if ((max_workers & (max_workers - 1)) != 0) b->Args({2048, max_workers});
}

}  // namespace

BENCHMARK(serial<Process::ZZ>)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(parallel<Process::ZZ>)->Apply(parallel_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(serial<Process::BPS>)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(parallel<Process::BPS>)->Apply(parallel_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(serial<Process::RHMC>)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(parallel<Process::RHMC>)->Apply(parallel_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

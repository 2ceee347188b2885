#include "pdmp/ensemble.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "pdmp/rng.hpp"

namespace pdmp {

namespace {

struct Partial {
    std::vector<CurveAccumulator> acc;
    EventCounts counts;
    std::int64_t ok = 0;
    std::int64_t failed = 0;
    std::int64_t warnings = 0;
    std::string first_error;

    explicit Partial(const EnsembleSpec& spec) : acc(spec.observables.size(), CurveAccumulator(spec.grid.size())) {}

    void merge(const Partial& o)
    {
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k].merge(o.acc[k]);
        counts += o.counts;
        ok += o.ok;
        failed += o.failed;
        warnings += o.warnings;
        if (first_error.empty()) first_error = o.first_error;
    }
};

void validate(const EnsembleSpec& spec)
{
    if (spec.potential == nullptr) throw std::invalid_argument("ensemble: no potential");
    if (spec.n_chains < 1) throw std::invalid_argument("ensemble: n_chains must be at least 1");
    if (!(spec.total_time > 0.0)) throw std::invalid_argument("ensemble: total_time must be positive");
    if (spec.observables.empty()) throw std::invalid_argument("ensemble: no observables");
    for (double t : spec.grid)
        if (t < 0.0 || t > spec.total_time) throw std::invalid_argument("ensemble: grid point outside [0, total_time]");
    if (!std::is_sorted(spec.grid.begin(), spec.grid.end())) throw std::invalid_argument("ensemble: grid not sorted");
    for (const auto& f : spec.observables)
        if (f.dim() != spec.potential->dim()) throw std::invalid_argument("ensemble: observable dimension mismatch");
}

void run_chain(const EnsembleSpec& spec, std::int64_t index, Partial& out)
{
    try {
        ChainRng rng = ChainRng::for_chain(spec.master_seed, static_cast<std::uint64_t>(index));
        const Trajectory traj =
            simulate(spec.process, *spec.potential, spec.gamma, spec.total_time, spec.init, rng, spec.sampler);
        std::vector<std::vector<double>> values;
        values.reserve(spec.observables.size());
        for (const auto& f : spec.observables) values.push_back(sample_on_grid(traj, f, spec.grid));
        for (std::size_t k = 0; k < values.size(); ++k) out.acc[k].add(values[k]);
        out.counts += traj.counts();
        out.warnings += static_cast<std::int64_t>(traj.warnings().size());
        ++out.ok;
    }
    catch (const std::exception& e) {
        ++out.failed;
        if (out.first_error.empty()) out.first_error = "chain " + std::to_string(index) + ": " + e.what();
    }
}

EnsembleResult finish(const EnsembleSpec& spec, const Partial& total)
{
    EnsembleResult r;
    for (const auto& acc : total.acc) r.curves.push_back(acc.finish(spec.grid));
    r.counts = total.counts;
    r.chains_ok = total.ok;
    r.chains_failed = total.failed;
    r.first_error = total.first_error;
    r.warnings = total.warnings;
    return r;
}

}  // namespace

EnsembleResult run_ensemble_serial(const EnsembleSpec& spec)
{
    validate(spec);
    Partial total(spec);
    for (std::int64_t i = 0; i < spec.n_chains; ++i) run_chain(spec, i, total);
    return finish(spec, total);
}

EnsembleResult run_ensemble(const EnsembleSpec& spec, int workers)
{
    validate(spec);
    const std::int64_t blocks = (spec.n_chains + kEnsembleBlock - 1) / kEnsembleBlock;
    std::vector<Partial> partials(static_cast<std::size_t>(blocks), Partial(spec));
    const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t b = 0; b < blocks; ++b) {
        const std::int64_t lo = b * kEnsembleBlock;
        const std::int64_t hi = std::min(spec.n_chains, lo + kEnsembleBlock);
        Partial& part = partials[static_cast<std::size_t>(b)];
        for (std::int64_t i = lo; i < hi; ++i) run_chain(spec, i, part);
    }

    Partial total(spec);
    for (const auto& p : partials) total.merge(p);
    return finish(spec, total);
}

std::vector<double> uniform_grid(double total_time, double dt)
{
    if (!(total_time > 0.0) || !(dt > 0.0)) throw std::invalid_argument("uniform_grid: needs positive total_time and dt");
    const auto steps = static_cast<std::size_t>(std::floor(total_time / dt + 1e-9));
    std::vector<double> grid(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) grid[i] = std::min(total_time, static_cast<double>(i) * dt);
    return grid;
}

}  // namespace pdmp

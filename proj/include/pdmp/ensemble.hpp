#ifndef PDMP_ENSEMBLE_HPP
#define PDMP_ENSEMBLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pdmp/diagnostics.hpp"
#include "pdmp/samplers.hpp"

namespace pdmp {

/// Many independent chains of one process, reduced to observable curves on
/// a time grid. Chain i draws from ChainRng::for_chain(master_seed, i), so a
/// chain's path does not depend on which thread runs it.
struct EnsembleSpec {
    Process process = Process::RHMC;
    const Potential* potential = nullptr;
    double gamma = 1.0;
    double total_time = 1.0;
    InitialCondition init;
    SamplerConfig sampler;
    std::vector<double> grid;
    std::vector<Observable> observables;
    std::uint64_t master_seed = 0;
    std::int64_t n_chains = 1;
};

struct EnsembleResult {
    std::vector<ObservableCurve> curves;  // one per observable
    EventCounts counts;
    std::int64_t chains_ok = 0;
    std::int64_t chains_failed = 0;
    std::string first_error;
    std::int64_t warnings = 0;
};

/// Reference implementation: chains in index order on the calling thread.
EnsembleResult run_ensemble_serial(const EnsembleSpec& spec);

/// OpenMP over fixed blocks of kEnsembleBlock chains; block partials are
/// merged in block order, so the result is bitwise identical for any worker
/// count. workers <= 0 uses the OpenMP default.
EnsembleResult run_ensemble(const EnsembleSpec& spec, int workers = 0);

inline constexpr std::int64_t kEnsembleBlock = 64;

/// Evenly spaced grid 0, dt, 2 dt, ... up to and including total_time.
std::vector<double> uniform_grid(double total_time, double dt);

}  // namespace pdmp

#endif  // PDMP_ENSEMBLE_HPP

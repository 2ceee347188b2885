#include "doctest.h"

#include <cmath>
#include <vector>

#include "pdmp/ensemble.hpp"

using namespace pdmp;

namespace {

EnsembleSpec small_spec(Process p, const Potential& pot, std::int64_t chains)
{
    EnsembleSpec spec;
    spec.process = p;
    spec.potential = &pot;
    spec.gamma = 1.0;
    spec.total_time = 6.0;
    spec.init = InitialCondition::fixed_position(Vec(static_cast<std::size_t>(pot.dim()), 1.5));
    spec.grid = uniform_grid(6.0, 0.25);
    spec.observables = {Observable::position(pot.dim(), 0), Observable::velocity(pot.dim(), 0)};
    spec.master_seed = 2718;
    spec.n_chains = chains;
    return spec;
}

}  // namespace

TEST_CASE("uniform grid")
{
    const auto g = uniform_grid(1.0, 0.25);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK_THROWS(uniform_grid(1.0, 0.0));
}

TEST_CASE("parallel kernel matches the serial reference")
{
    const std::vector<double> diag{1.0, 3.0};
    const auto pot = Potential::diagonal_gaussian(diag);
    for (Process p : {Process::RHMC, Process::ZZ, Process::BPS}) {
        const EnsembleSpec spec = small_spec(p, pot, 300);
        const EnsembleResult serial = run_ensemble_serial(spec);
        const EnsembleResult parallel = run_ensemble(spec, 3);
        CHECK(serial.chains_ok == 300);
        CHECK(parallel.chains_ok == 300);
        CHECK(serial.counts.refresh == parallel.counts.refresh);
        CHECK(serial.counts.bounce == parallel.counts.bounce);
        for (std::size_t k = 0; k < serial.curves.size(); ++k)
            for (std::size_t i = 0; i < spec.grid.size(); ++i) {
                CHECK(std::abs(serial.curves[k].mean[i] - parallel.curves[k].mean[i]) <= 1e-12);
                CHECK(std::abs(serial.curves[k].std_error[i] - parallel.curves[k].std_error[i]) <= 1e-12);
            }
    }
}

TEST_CASE("worker count does not change a single bit")
{
    const auto pot = Potential::double_well_product(2);
    const EnsembleSpec spec = small_spec(Process::ZZ, pot, 200);
    const EnsembleResult one = run_ensemble(spec, 1);
    const EnsembleResult four = run_ensemble(spec, 4);
    for (std::size_t k = 0; k < one.curves.size(); ++k) {
        CHECK(one.curves[k].mean == four.curves[k].mean);
        CHECK(one.curves[k].std_error == four.curves[k].std_error);
    }
}

TEST_CASE("chain errors are counted, not fatal")
{
    CustomPotential fns;
    fns.value = [](std::span<const double> x) { return x[0] * x[0] / 2; };
    fns.gradient = [](std::span<const double> x, std::span<double> g) { g[0] = x[0]; };
    // deliberately too small: the rate outgrows it
    fns.envelope = [](std::span<const double>, std::span<const double>, BounceField, double) {
        return RateEnvelope{0.5, 0.0};
    };
    const auto pot = Potential::custom(1, fns, PotentialMeta{});
    const EnsembleSpec spec = small_spec(Process::ZZ, pot, 10);
    const EnsembleResult r = run_ensemble(spec, 2);
    CHECK(r.chains_failed > 0);
    CHECK(r.chains_ok + r.chains_failed == 10);
    CHECK_FALSE(r.first_error.empty());
}

TEST_CASE("ensemble needs a potential and observables on its dimension")
{
    const auto pot = Potential::isotropic_gaussian(2, 1.0);
    EnsembleSpec spec = small_spec(Process::ZZ, pot, 4);
    spec.potential = nullptr;
    CHECK_THROWS(run_ensemble(spec));
    spec = small_spec(Process::ZZ, pot, 4);
    spec.observables = {Observable::position(3, 0)};
    CHECK_THROWS(run_ensemble_serial(spec));
}

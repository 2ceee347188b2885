#include "doctest.h"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pdmp/diagnostics.hpp"
#include "pdmp/errors.hpp"
#include "support.hpp"

using namespace pdmp;

namespace {

/// Piecewise-linear 1D path through the given anchors (t, x, v).
Trajectory linear_path(const std::vector<std::array<double, 3>>& anchors, double total)
{
    Trajectory traj(Process::ZZ, 1);
    for (const auto& a : anchors) {
        const std::vector<double> x{a[1]}, v{a[2]};
        traj.append_anchor(a[0], x, v, FlowKind::Linear, a[0] == 0.0 ? AnchorCause::Start : AnchorCause::Bounce);
    }
    const auto& last = anchors.back();
    traj.finish(PhaseState{total, {last[1] + (total - last[0]) * last[2]}, {last[2]}});
    return traj;
}

Observable power(const Observable& base, int k)
{
    Observable out = Observable::constant(base.dim(), 1.0);
    for (int i = 0; i < k; ++i) out = out * base;
    return out;
}

/// Midpoint rule with step h over [0, T] using position_at.
double riemann_average(const Trajectory& traj, const Observable& f, double h)
{
    const double total = traj.total_time();
    const auto n = static_cast<long>(std::llround(total / h));
    double s = 0.0;
    for (long i = 0; i < n; ++i) {
        const PhaseState p = position_at(traj, (i + 0.5) * h);
        s += f(p.x, p.v);
    }
    return s * h / total;
}

ObservableCurve synthetic(const std::vector<double>& grid, auto fn, double se = 0.0)
{
    ObservableCurve c;
    c.grid = grid;
    for (double t : grid) c.mean.push_back(fn(t));
    c.std_error.assign(grid.size(), se);
    c.n_chains = 1;
    return c;
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
    return g;
}

}  // namespace

TEST_CASE("observables")
{
    const Observable x = Observable::position(2, 1);
    const Observable v = Observable::velocity(2, 0);
    const Observable f = x * x * 3.0 + v + Observable::constant(2, 1.0);
    const std::vector<double> px{5.0, 2.0}, pv{-1.0, 7.0};
    CHECK(f(px, pv) == doctest::Approx(3 * 4 - 1 + 1));
    CHECK(f.degree() == 2);
    CHECK(power(x, 5).degree() == 5);
}

TEST_CASE("position_at examples")
{
    const Trajectory traj = linear_path({{0.0, 0.0, 1.0}, {1.0, 1.0, -2.0}}, 3.0);
    CHECK(position_at(traj, 0.5).x[0] == doctest::Approx(0.5));
    const PhaseState at_anchor = position_at(traj, 1.0);
    CHECK(at_anchor.x[0] == 1.0);
    CHECK(at_anchor.v[0] == -2.0);
    CHECK(position_at(traj, 3.0).x[0] == doctest::Approx(-3.0));
    CHECK_THROWS_AS(position_at(traj, 3.5), std::out_of_range);
    CHECK_THROWS_AS(position_at(traj, -0.1), std::out_of_range);
}

TEST_CASE("analytic segment half rotation")
{
    const auto pot = Potential::isotropic_gaussian(1, 1.0);
    Trajectory traj(Process::RHMC, 1, std::make_shared<HarmonicFlow>(pot.eigen_ptr()));
    const std::vector<double> x{1.0}, v{0.0};
    traj.append_anchor(0.0, x, v, FlowKind::HamiltonianAnalytic, AnchorCause::Start);
    traj.finish(PhaseState{4.0, {std::cos(4.0)}, {-std::sin(4.0)}});
    CHECK(position_at(traj, std::numbers::pi).x[0] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("time averages of simple paths")
{
    const Trajectory ramp = linear_path({{0.0, 0.0, 1.0}}, 2.0);
    CHECK(segment_time_average(ramp, Observable::constant(1, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(segment_time_average(ramp, Observable::position(1, 0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gauss-legendre is exact through degree five on linear segments")
{
    const std::vector<std::array<double, 3>> anchors{{0.0, 0.3, 1.2}, {0.7, 1.14, -0.8}, {2.1, 0.02, 2.5}};
    const Trajectory traj = linear_path(anchors, 3.0);
    const Observable x = Observable::position(1, 0);
    const Observable v = Observable::velocity(1, 0);
    for (int k = 0; k <= 5; ++k) {
        // closed form per segment: integral of (x0 + v s)^k ds
        double exact = 0.0;
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            const double t0 = anchors[i][0];
            const double t1 = i + 1 < anchors.size() ? anchors[i + 1][0] : 3.0;
            const double x0 = anchors[i][1], vel = anchors[i][2];
            const double x1 = x0 + vel * (t1 - t0);
            exact += (std::pow(x1, k + 1) - std::pow(x0, k + 1)) / ((k + 1) * vel);
        }
        CHECK(testing::rel_err(segment_time_average(traj, power(x, k)), exact / 3.0) <= 1e-12);
    }
    // mixed monomial x^2 v^3
    double exact = 0.0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const double t0 = anchors[i][0];
        const double t1 = i + 1 < anchors.size() ? anchors[i + 1][0] : 3.0;
        const double x0 = anchors[i][1], vel = anchors[i][2];
        const double x1 = x0 + vel * (t1 - t0);
        exact += std::pow(vel, 3) * (std::pow(x1, 3) - std::pow(x0, 3)) / (3 * vel);
    }
    CHECK(testing::rel_err(segment_time_average(traj, power(x, 2) * power(v, 3)), exact / 3.0) <= 1e-12);
    CHECK_THROWS_AS(segment_time_average(traj, power(x, 6)), UnsupportedObservable);
}

TEST_CASE("time averages match a dense Riemann sum")
{
    const auto pot = Potential::isotropic_gaussian(1, 1.0);
    const Observable x2 = Observable::position(1, 0) * Observable::position(1, 0);
    SUBCASE("zigzag")
    {
        ChainRng rng(41);
        const Trajectory traj = simulate(Process::ZZ, pot, 1.0, 20.0, InitialCondition::fixed_position({1.5}), rng);
        REQUIRE(traj.size() > 10);
        CHECK(testing::rel_err(segment_time_average(traj, x2), riemann_average(traj, x2, 1e-4)) <= 1e-6);
    }
    SUBCASE("rhmc analytic flow")
    {
        ChainRng rng(42);
        const Trajectory traj = simulate(Process::RHMC, pot, 1.0, 20.0, InitialCondition::fixed_position({1.5}), rng);
        CHECK(testing::rel_err(segment_time_average(traj, x2), riemann_average(traj, x2, 1e-4)) <= 1e-6);
    }
}

TEST_CASE("position_at is continuous across segment boundaries")
{
    const std::vector<double> rows{2.0, 0.5, 0.5, 1.0};
    const auto pot = Potential::quadratic(DenseMatrix::from_rows(2, 2, rows));
    for (Process p : {Process::RHMC, Process::ZZ, Process::BPS}) {
        ChainRng rng(43);
        const Trajectory traj = simulate(p, pot, 1.0, 100.0, InitialCondition::fixed_position({1.0, -1.0}), rng);
        Vec x(2), v(2);
        for (std::size_t i = 1; i < traj.size(); ++i) {
            traj.state_in_segment(i - 1, traj.time(i), x, v);
            const PhaseState right = position_at(traj, traj.time(i));
            for (std::size_t k = 0; k < 2; ++k) CHECK(std::abs(x[k] - right.x[k]) <= 1e-10);
        }
    }
}

TEST_CASE("sample_on_grid agrees with position_at")
{
    const auto pot = Potential::isotropic_gaussian(1, 1.0);
    ChainRng rng(44);
    const Trajectory traj = simulate(Process::BPS, pot, 1.0, 10.0, InitialCondition::fixed_position({1.0}), rng);
    const auto grid = linspace(0.0, 10.0, 101);
    const auto f = Observable::position(1, 0);
    const auto vals = sample_on_grid(traj, f, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const PhaseState s = position_at(traj, grid[i]);
        CHECK(vals[i] == doctest::Approx(s.x[0]).epsilon(1e-14));
    }
}

TEST_CASE("degenerate ensembles")
{
    const auto pot = Potential::isotropic_gaussian(1, 1.0);
    std::vector<Trajectory> same;
    for (int i = 0; i < 5; ++i) {
        ChainRng rng(45);
        same.push_back(simulate(Process::ZZ, pot, 1.0, 5.0, InitialCondition::fixed_position({1.0}), rng));
    }
    const auto grid = linspace(0.0, 5.0, 11);
    const ObservableCurve c = ensemble_mean_curve(same, Observable::position(1, 0), grid);
    for (double se : c.std_error) CHECK(se == 0.0);
    const ObservableCurve one = ensemble_mean_curve(same, Observable::constant(1, 1.0), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(one.mean[i] == 1.0);
        CHECK(one.std_error[i] == 0.0);
    }
    CHECK(c.n_chains == 5);
}

TEST_CASE("rhmc ensemble mean follows the linear mean ODE")
{
    // E x'' + E x' + E x = 0 from x = 2, E v = 0
    const auto pot = Potential::isotropic_gaussian(1, 1.0);
    std::vector<Trajectory> trajs;
    trajs.reserve(10000);
    for (int i = 0; i < 10000; ++i) {
        ChainRng rng = ChainRng::for_chain(46, static_cast<std::uint64_t>(i));
        trajs.push_back(simulate(Process::RHMC, pot, 1.0, 10.0, InitialCondition::fixed_position({2.0}), rng));
    }
    const auto grid = linspace(0.5, 10.0, 20);
    const ObservableCurve c = ensemble_mean_curve(trajs, Observable::position(1, 0), grid);
    const double w = std::sqrt(3.0) / 2.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const double oracle = std::exp(-t / 2) * (2.0 * std::cos(w * t) + std::sin(w * t) / w);
        INFO("t = " << t);
        CHECK(std::abs(c.mean[i] - oracle) <= 3.0 * c.std_error[i]);
    }
}

TEST_CASE("fits of synthetic curves")
{
    SUBCASE("exact exponential")
    {
        const ObservableCurve c = synthetic(linspace(0.0, 3.0, 31), [](double t) { return std::exp(-2 * t); });
        const DecayFit fit = fit_decay_rate(c, 0.0, {0.0, 3.0});
        CHECK(std::abs(fit.nu_hat - 2.0) <= 1e-10);
        CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.points_used == 31);
    }
    SUBCASE("constant")
    {
        const ObservableCurve c = synthetic(linspace(0.0, 3.0, 31), [](double) { return 1.0; });
        const DecayFit fit = fit_decay_rate(c, 0.0, {0.0, 3.0});
        CHECK(fit.nu_hat == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("noisy exponential")
    {
        std::mt19937_64 rng(47);
        std::normal_distribution<double> noise(0.0, 1e-4);
        const ObservableCurve c =
            synthetic(linspace(0.0, 4.0, 50), [&](double t) { return 0.5 * std::exp(-t) + noise(rng); }, 1e-4);
        const DecayFit fit = fit_decay_rate(c, 0.0, {0.0, 4.0});
        CHECK(std::abs(fit.nu_hat - 1.0) < 0.05);
        CHECK(std::abs(fit.nu_hat - 1.0) < 3.0 * fit.std_error);
    }
    SUBCASE("target offset and window")
    {
        const ObservableCurve c = synthetic(linspace(0.0, 10.0, 101), [](double t) { return 3.0 + std::exp(-0.5 * t); });
        const DecayFit fit = fit_decay_rate(c, 3.0, {2.0, 6.0});
        CHECK(fit.nu_hat == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(fit.points_used == 41);
        CHECK(fit.window.t1 == 2.0);
    }
}

TEST_CASE("fit needs signal above the noise")
{
    const ObservableCurve c = synthetic(linspace(0.0, 3.0, 31), [](double t) { return 1e-3 * std::exp(-t); }, 1.0);
    CHECK_THROWS_AS(fit_decay_rate(c, 0.0, {0.0, 3.0}), InsufficientSignal);
    const ObservableCurve clean = synthetic(linspace(0.0, 3.0, 31), [](double t) { return std::exp(-t); });
    CHECK_THROWS_AS(fit_decay_rate(clean, 0.0, {0.0, 3.0}, 0.9), InsufficientSignal);
    CHECK_THROWS(fit_decay_rate(clean, 0.0, {2.0, 1.0}));
}

TEST_CASE("envelope of a damped rotation")
{
    const auto grid = linspace(0.0, 8.0, 81);
    const ObservableCurve a = synthetic(grid, [](double t) { return std::exp(-0.3 * t) * std::cos(2 * t); });
    const ObservableCurve b = synthetic(grid, [](double t) { return -2.0 * std::exp(-0.3 * t) * std::sin(2 * t); });
    const ObservableCurve env = envelope_curve(a, b, 0.0, 0.0, 2.0);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(env.mean[i] == doctest::Approx(2.0 * std::exp(-0.3 * grid[i])));
    CHECK(fit_decay_rate(env, 0.0, {0.0, 8.0}).nu_hat == doctest::Approx(0.3).epsilon(1e-10));

    const ObservableCurve peaks = local_maxima_curve(a);
    CHECK(peaks.grid.size() >= 3);
    const DecayFit fit = fit_decay_rate(peaks, 0.0, {0.0, 8.0});
    CHECK(fit.nu_hat == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("default fit window")
{
    const auto grid = linspace(0.0, 20.0, 201);
    const ObservableCurve c = synthetic(grid, [](double t) { return std::exp(-t); }, 1e-4);
    // |mean| < 3e-4 first at t = 8.2
    const FitWindow w = default_fit_window(c, 0.0, 0.25, 3.0, 0.5);
    CHECK(w.t2 == doctest::Approx(8.2));
    CHECK(w.t1 == doctest::Approx(4.0));
    const FitWindow early = default_fit_window(c, 0.0, 2.0, 3.0, 0.5);
    CHECK(early.t1 == doctest::Approx(0.5));
    CHECK_THROWS(default_fit_window(c, 0.0, 1.0, 3.0, 1.5));
}

TEST_CASE("moment check truth and preconditions")
{
    const auto pot = Potential::isotropic_gaussian(1, 1.0);
    ChainRng rng(48);
    const Trajectory traj = simulate(Process::ZZ, pot, 1.0, 2000.0, InitialCondition::stationary(), rng);
    const auto z = moment_check(traj, pot);
    REQUIRE(z.size() == 4);
    std::map<std::string, double> truth;
    for (const auto& m : z) truth[m.name] = m.truth;
    CHECK(truth.at("x1") == 0.0);
    CHECK(truth.at("x1x1") == doctest::Approx(1.0));
    CHECK(truth.at("v1v1") == 1.0);
    CHECK(truth.at("x1v1") == 0.0);
    for (const auto& m : z) CHECK(std::abs(m.z) < 5.0);

    ChainRng short_rng(49);
    const Trajectory tiny = simulate(Process::ZZ, pot, 1.0, 0.5, InitialCondition::stationary(), short_rng);
    CHECK_THROWS(moment_check(tiny, pot));
    CHECK_THROWS(moment_check(traj, Potential::double_well_product(1)));
}

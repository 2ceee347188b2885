#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "pdmp/spectral.hpp"
#include "support.hpp"

using namespace pdmp;

namespace {

std::size_t idx(int n, int i, int p) { return static_cast<std::size_t>(i * n + p); }

}  // namespace

TEST_CASE("constants are annihilated and means preserved")
{
    std::mt19937_64 rng(51);
    std::normal_distribution<double> n01;
    for (Process p : {Process::RHMC, Process::ZZ, Process::BPS}) {
        for (double gamma : {0.0, 0.3, 2.0}) {
            const TruncatedGenerator gen = assemble_generator_1d(p, 1.7, gamma, 12);
            std::vector<double> e0(gen.size(), 0.0), out(gen.size());
            e0[0] = 1.0;
            gen.apply(e0, out);
            CHECK(testing::norm2(out) <= 1e-10);
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> c(gen.size());
                for (double& x : c) x = n01(rng);
                gen.apply(c, out);
                CHECK(std::abs(out[0]) <= 1e-8 * testing::norm2(c));
            }
        }
    }
}

TEST_CASE("rhmc block on span{x, v}")
{
    const TruncatedGenerator gen = assemble_generator_1d(Process::RHMC, 1.0, 1.0, 2);
    const DenseMatrix l = gen.dense();
    const std::size_t x = idx(2, 1, 0), v = idx(2, 0, 1);
    // d/dt (c_x, c_v) = [[0, -1], [1, -1]] (c_x, c_v)
    CHECK(l(x, x) == doctest::Approx(0.0));
    CHECK(l(x, v) == doctest::Approx(-1.0));
    CHECK(l(v, x) == doctest::Approx(1.0));
    CHECK(l(v, v) == doctest::Approx(-1.0));
}

TEST_CASE("bounce term vanishes between even velocity degrees")
{
    // ZZ minus RHMC leaves the bounce term plus U' d/dv, which only links
    // velocity degrees of opposite parity.
    const int n = 10;
    const DenseMatrix zz = assemble_generator_1d(Process::ZZ, 1.3, 0.0, n).dense();
    const DenseMatrix hmc = assemble_generator_1d(Process::RHMC, 1.3, 0.0, n).dense();
    double nonzero_odd = 0.0;
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < n; ++p)
            for (int j = 0; j < n; ++j)
                for (int q = 0; q < n; ++q) {
                    const double b = zz(idx(n, i, p), idx(n, j, q)) - hmc(idx(n, i, p), idx(n, j, q));
                    if (p % 2 == 0 && q % 2 == 0) CHECK(std::abs(b) <= 1e-12);
                    if (p % 2 == 1 && q % 2 == 1) nonzero_odd = std::max(nonzero_odd, std::abs(b));
                }
    CHECK(nonzero_odd > 0.1);
}

TEST_CASE("bps and zigzag share the 1D generator")
{
    const DenseMatrix zz = assemble_generator_1d(Process::ZZ, 0.8, 1.1, 8).dense();
    const DenseMatrix bps = assemble_generator_1d(Process::BPS, 0.8, 1.1, 8).dense();
    for (std::size_t i = 0; i < zz.rows(); ++i)
        for (std::size_t j = 0; j < zz.cols(); ++j) CHECK(zz(i, j) == bps(i, j));
}

TEST_CASE("refresh-only generator is diagonal")
{
    GeneratorOptions opts;
    opts.transport = false;
    const int n = 6;
    const double gamma = 0.7;
    for (Process p : {Process::RHMC, Process::ZZ}) {
        const DenseMatrix l = assemble_generator_1d(p, 1.0, gamma, n, opts).dense();
        for (int i = 0; i < n; ++i)
            for (int pp = 0; pp < n; ++pp)
                for (std::size_t col = 0; col < l.cols(); ++col) {
                    const std::size_t row = idx(n, i, pp);
                    const double expected = row == col ? (pp == 0 ? 0.0 : -gamma) : 0.0;
                    CHECK(l(row, col) == expected);
                }
    }
}

TEST_CASE("rhmc transport is antisymmetric and zigzag dissipates")
{
    const int n = 10;
    const DenseMatrix hmc = assemble_generator_1d(Process::RHMC, 2.0, 0.0, n).dense();
    const DenseMatrix zz = assemble_generator_1d(Process::ZZ, 2.0, 0.0, n).dense();
    std::mt19937_64 rng(52);
    std::normal_distribution<double> n01;
    for (std::size_t i = 0; i < hmc.rows(); ++i)
        for (std::size_t j = 0; j < hmc.cols(); ++j) CHECK(std::abs(hmc(i, j) + hmc(j, i)) <= 1e-12);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> c(zz.rows());
        for (double& x : c) x = n01(rng);
        CHECK(dot(c, zz.multiply(c)) <= 1e-10 * dot(c, c));
    }
}

TEST_CASE("abs moment quadrature converges")
{
    const DenseMatrix a200 = abs_moment_matrix(32, 200);
    const DenseMatrix a400 = abs_moment_matrix(32, 400);
    double worst = 0.0;
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < 32; ++j) worst = std::max(worst, std::abs(a200(i, j) - a400(i, j)));
    CHECK(worst <= 1e-10);
    // E|Y| = sqrt(2/pi), E|Y| He_1^2 = E|Y|^3 = 2 sqrt(2/pi)
    CHECK(a200(0, 0) == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-14));
    CHECK(a200(1, 1) == doctest::Approx(2.0 * std::sqrt(2.0 / M_PI)).epsilon(1e-14));
    CHECK(std::abs(a200(0, 1)) <= 1e-15);
}

TEST_CASE("propagation without refreshment conserves the rhmc norm")
{
    const TruncatedGenerator gen = assemble_generator_1d(Process::RHMC, 1.0, 0.0, 16);
    const auto f0 = position_mode(gen);
    const SpectralDecay out = decay_rate_spectral(gen, f0, 20.0, 0.5 * max_stable_dt(gen));
    CHECK(std::abs(out.nu_spec) <= 1e-6);
    CHECK(out.norm_curve.back().norm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(out.max_energy_gap <= 1e-6);
}

TEST_CASE("energy inequality and monotone norm at moderate truncation")
{
    for (Process p : {Process::RHMC, Process::ZZ}) {
        const TruncatedGenerator gen = assemble_generator_1d(p, 1.0, 1.0, 16);
        const SpectralDecay out = decay_rate_spectral(gen, position_mode(gen), 10.0, max_stable_dt(gen));
        CHECK(out.max_norm_increase <= 1e-6);
        CHECK(out.max_energy_excess <= 1e-4);
        if (p == Process::RHMC) CHECK(out.max_energy_gap <= 1e-6);
        CHECK(out.norm_curve.front().t == 0.0);
        CHECK(out.norm_curve.back().t == doctest::Approx(10.0));
    }
}

TEST_CASE("spectral propagation preconditions")
{
    const TruncatedGenerator gen = assemble_generator_1d(Process::ZZ, 1.0, 1.0, 8);
    std::vector<double> with_mean(gen.size(), 0.0);
    with_mean[0] = 1.0;
    with_mean[idx(8, 1, 0)] = 1.0;
    CHECK_THROWS_AS(decay_rate_spectral(gen, with_mean, 1.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(decay_rate_spectral(gen, std::vector<double>(gen.size(), 0.0), 1.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(decay_rate_spectral(gen, position_mode(gen), 1.0, 10.0 * max_stable_dt(gen)),
                    std::invalid_argument);
    CHECK_THROWS(assemble_generator_1d(Process::ZZ, 1.0, 1.0, 1));
    CHECK_THROWS(assemble_generator_1d(Process::ZZ, -1.0, 1.0, 4));
}

TEST_CASE("spectral radius estimate bounds the action")
{
    const TruncatedGenerator gen = assemble_generator_1d(Process::ZZ, 1.0, 1.0, 12);
    const double rho = spectral_radius_estimate(gen);
    CHECK(rho > 0.0);
    CHECK(max_stable_dt(gen) == doctest::Approx(0.1 / rho));
}

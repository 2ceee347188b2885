#ifndef PDMP_TESTS_SUPPORT_HPP
#define PDMP_TESTS_SUPPORT_HPP

#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>
#include <vector>

#include "pdmp/rng.hpp"

namespace pdmp::testing {

/// Replays queued variates; falls back to a seeded engine once a queue runs dry
/// unless `strict` is set.
class ScriptedStream final : public VariateStream {
public:
    std::deque<double> uniforms;
    std::deque<double> normals;
    std::deque<double> exponentials;
    bool strict = true;

    double uniform() override { return next(uniforms, [this] { return fallback_u(); }); }
    double normal() override { return next(normals, [this] { return std::normal_distribution<double>()(engine_); }); }
    double exponential() override { return next(exponentials, [this] { return -std::log(fallback_u()); }); }

private:
    template <class F>
    double next(std::deque<double>& q, F fallback)
    {
        if (q.empty()) {
            if (strict) throw std::logic_error("scripted stream exhausted");
            return fallback();
        }
        const double x = q.front();
        q.pop_front();
        return x;
    }
    double fallback_u() { return std::uniform_real_distribution<double>(0x1p-53, 1.0)(engine_); }

    std::mt19937_64 engine_{12345};
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double norm2(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace pdmp::testing

#endif  // PDMP_TESTS_SUPPORT_HPP

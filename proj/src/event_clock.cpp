#include "pdmp/event_clock.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pdmp/errors.hpp"

namespace pdmp {

ArrivalTime sample_exponential(double rate, double u)
{
    if (rate < 0.0) throw std::invalid_argument("sample_exponential: negative rate");
    if (rate == 0.0) return ArrivalTime::never();
    return ArrivalTime(-std::log(u) / rate);
}

double integrated_affine_rate(double a, double c, double tau)
{
    if (tau <= 0.0) return 0.0;
    if (c == 0.0) return a > 0.0 ? a * tau : 0.0;
    // (a + c s) is positive on [lo, hi] within [0, tau]
    double lo = 0.0;
    double hi = tau;
    const double root = -a / c;
    if (c > 0.0)
        lo = std::max(0.0, root);
    else
        hi = std::min(tau, root);
    if (hi <= lo) return 0.0;
    return a * (hi - lo) + 0.5 * c * (hi * hi - lo * lo);
}

ArrivalTime first_arrival_affine(double a, double c, double e)
{
    if (!(e > 0.0)) throw std::invalid_argument("first_arrival_affine: exponential variate must be positive");
    if (c == 0.0) return a > 0.0 ? ArrivalTime(e / a) : ArrivalTime::never();
    if (c > 0.0) {
        if (a >= 0.0) return ArrivalTime(2.0 * e / (a + std::sqrt(a * a + 2.0 * c * e)));
        return ArrivalTime(-a / c + std::sqrt(2.0 * e / c));
    }
    // c < 0: total mass a^2 / (2|c|) when a > 0
    if (a <= 0.0 || e >= a * a / (-2.0 * c)) return ArrivalTime::never();
    return ArrivalTime(2.0 * e / (a + std::sqrt(a * a + 2.0 * c * e)));
}

ArrivalOutcome first_arrival_thinning(const RateFunction& rate, const EnvelopeSupplier& envelope, double horizon,
                                      VariateStream& rng)
{
    if (!(horizon > 0.0)) throw std::invalid_argument("first_arrival_thinning: horizon must be positive");
    double base = 0.0;
    for (;;) {
        const RateEnvelope env = envelope(base, horizon - base);
        const ArrivalTime step = first_arrival_affine(env.a, env.c, rng.exponential());
        if (step.is_never() || base + step.value() >= horizon) return {ArrivalTime(horizon), true};

        const double t = base + step.value();
        const double bound = std::max(0.0, env.a + env.c * step.value());
        const double r = rate(t);
        if (r > bound + 1e-9) {
            std::ostringstream msg;
            msg << "rate " << r << " exceeds envelope " << bound << " at t=" << t << " (a=" << env.a
                << ", c=" << env.c << ")";
            throw EnvelopeViolation(msg.str());
        }
        if (rng.uniform() * bound <= r) return {ArrivalTime(t), false};
        base = t;
    }
}

}  // namespace pdmp

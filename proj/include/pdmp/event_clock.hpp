#ifndef PDMP_EVENT_CLOCK_HPP
#define PDMP_EVENT_CLOCK_HPP

#include <compare>
#include <functional>
#include <limits>

#include "pdmp/potential.hpp"
#include "pdmp/rng.hpp"

namespace pdmp {

/// Waiting time of a clock, with a distinguished "never fires" value.
class ArrivalTime {
public:
    constexpr ArrivalTime() = default;
    constexpr explicit ArrivalTime(double t) : t_(t) {}
    static constexpr ArrivalTime never() { return ArrivalTime(); }

    constexpr bool is_never() const { return t_ == std::numeric_limits<double>::infinity(); }
    constexpr double value() const { return t_; }

    friend constexpr auto operator<=>(ArrivalTime, ArrivalTime) = default;

private:
    double t_ = std::numeric_limits<double>::infinity();
};

struct ArrivalOutcome {
    ArrivalTime time;
    /// No event before the horizon; `time` then equals the horizon.
    bool exhausted_horizon = false;
};

/// -ln(u) / rate, never when rate == 0. Throws std::invalid_argument for a
/// negative rate.
ArrivalTime sample_exponential(double rate, double u);

/// Lambda(tau) = integral over [0, tau] of (a + c s)_+ ds.
double integrated_affine_rate(double a, double c, double tau);

/// The tau with Lambda(tau) = e, or never when Lambda stays below e.
ArrivalTime first_arrival_affine(double a, double c, double e);

/// Rate as a function of time since the clock was started.
using RateFunction = std::function<double(double)>;
/// Envelope valid on [base, base + span], expressed in time since base.
using EnvelopeSupplier = std::function<RateEnvelope(double base, double span)>;

/// First arrival of the inhomogeneous Poisson process with intensity
/// `rate` on [0, horizon], by thinning against affine envelopes re-anchored
/// at every rejected proposal. Throws EnvelopeViolation if the rate ever
/// exceeds the envelope by more than 1e-9.
ArrivalOutcome first_arrival_thinning(const RateFunction& rate, const EnvelopeSupplier& envelope, double horizon,
                                      VariateStream& rng);

}  // namespace pdmp

#endif  // PDMP_EVENT_CLOCK_HPP

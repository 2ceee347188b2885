#ifndef PDMP_SAMPLERS_HPP
#define PDMP_SAMPLERS_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdmp/linalg.hpp"
#include "pdmp/potential.hpp"
#include "pdmp/rng.hpp"

namespace pdmp {

enum class Process { RHMC, ZZ, BPS };

std::string_view to_string(Process p);
/// Accepts "rhmc", "zz", "bps" (any case).
Process parse_process(std::string_view name);

struct PhaseState {
    double t = 0.0;
    Vec x;
    Vec v;
};

enum class EventKind { Refresh, Bounce, SegmentMarker };

std::string_view to_string(EventKind k);

struct EventRecord {
    double time = 0.0;
    EventKind kind = EventKind::SegmentMarker;
    int index = -1;  // bounce coordinate for the zigzag, 0 for BPS
    Vec v_before;
    Vec v_after;
};

enum class FlowKind { Linear, HamiltonianAnalytic, HamiltonianLeapfrog };

/// Exact Hamiltonian flow of U = x^T A x / 2, rotating each eigenmode with
/// frequency sqrt(lambda).
class HarmonicFlow {
public:
    explicit HarmonicFlow(std::shared_ptr<const SymmetricEigen> eigen) : eigen_(std::move(eigen)) {}

    void advance(std::span<double> x, std::span<double> v, double dt) const;

private:
    std::shared_ptr<const SymmetricEigen> eigen_;
};

/// Velocity-Verlet integration of x' = v, v' = -grad U(x) for `duration`,
/// with a final partial step landing exactly on it. Intermediate step
/// anchors (times relative to the start) are appended to `substeps` when
/// given.
void leapfrog_flow(const Potential& potential, std::span<double> x, std::span<double> v, double duration, double h,
                   std::vector<PhaseState>* substeps = nullptr);

struct EventCounts {
    std::int64_t refresh = 0;
    std::int64_t bounce = 0;
    std::int64_t marker = 0;

    EventCounts& operator+=(const EventCounts& o)
    {
        refresh += o.refresh;
        bounce += o.bounce;
        marker += o.marker;
        return *this;
    }
};

/// Why an anchor was created; used for the CSV dump.
enum class AnchorCause : std::uint8_t { Start, Refresh, Bounce, Marker, IntegratorStep };

/// Piecewise-deterministic path on [0, total_time], stored as event-anchored
/// segments (t_i, x_i, v_i, flow_i) in flat arrays.
class Trajectory {
public:
    Trajectory(Process process, int dim, std::shared_ptr<const HarmonicFlow> harmonic = nullptr);

    Process process() const { return process_; }
    int dim() const { return dim_; }
    std::size_t size() const { return times_.size(); }
    double total_time() const { return final_.t; }

    double time(std::size_t i) const { return times_[i]; }
    /// End of segment i: the next anchor or total_time.
    double end_time(std::size_t i) const { return i + 1 < size() ? times_[i + 1] : final_.t; }
    std::span<const double> x(std::size_t i) const;
    std::span<const double> v(std::size_t i) const;
    FlowKind flow(std::size_t i) const { return flows_[i]; }
    AnchorCause cause(std::size_t i) const { return causes_[i]; }
    int cause_index(std::size_t i) const { return cause_index_[i]; }

    const PhaseState& final_state() const { return final_; }
    const std::vector<EventRecord>& events() const { return events_; }
    const EventCounts& counts() const { return counts_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    const HarmonicFlow* harmonic() const { return harmonic_.get(); }

    /// Index of the segment containing t (the last anchor with t_i <= t).
    std::size_t segment_at(double t) const;
    /// State at absolute time t within segment i.
    void state_in_segment(std::size_t i, double t, std::span<double> x, std::span<double> v) const;

    void append_anchor(double t, std::span<const double> x, std::span<const double> v, FlowKind flow,
                       AnchorCause cause, int index = -1);
    void record_event(EventRecord e) { events_.push_back(std::move(e)); }
    EventCounts& mutable_counts() { return counts_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }
    void finish(PhaseState final_state) { final_ = std::move(final_state); }

private:
    Process process_;
    int dim_;
    std::shared_ptr<const HarmonicFlow> harmonic_;
    std::vector<double> times_;
    std::vector<double> xs_;
    std::vector<double> vs_;
    std::vector<FlowKind> flows_;
    std::vector<AnchorCause> causes_;
    std::vector<int> cause_index_;
    std::vector<EventRecord> events_;
    EventCounts counts_;
    std::vector<std::string> warnings_;
    PhaseState final_;
};

struct SamplerConfig {
    /// Horizon of each thinning attempt (performance knob only).
    double thinning_horizon = 1.0;
    /// Leapfrog step for RHMC on non-quadratic potentials.
    double leapfrog_step = 0.01;
    /// Relative Hamiltonian drift over one RHMC leg that triggers a warning.
    double energy_drift_bound = 0.05;
    bool record_events = true;
};

struct StepResult {
    PhaseState state;
    EventRecord event;
    /// True when the step was cut at t_stop without an event.
    bool reached_stop = false;
    /// Leapfrog step anchors strictly inside the leg (RHMC, non-quadratic).
    std::vector<PhaseState> substeps;
    std::optional<std::string> warning;
};

/// v - 2 (v.n) n with n = direction / |direction|; v unchanged when the
/// direction vanishes.
Vec reflect(std::span<const double> v, std::span<const double> direction);

/// v ~ N(0, I_d).
Vec refresh_velocity(int d, VariateStream& rng);

StepResult zz_advance(const PhaseState& state, const Potential& potential, double gamma, VariateStream& rng,
                      const SamplerConfig& cfg = {}, double t_stop = kInf);
StepResult bps_advance(const PhaseState& state, const Potential& potential, double gamma, VariateStream& rng,
                       const SamplerConfig& cfg = {}, double t_stop = kInf);
StepResult rhmc_advance(const PhaseState& state, const Potential& potential, double gamma, VariateStream& rng,
                        const SamplerConfig& cfg = {}, double t_stop = kInf);

struct InitialCondition {
    enum class Position { Fixed, Stationary };

    Position position = Position::Fixed;
    Vec x;
    /// Drawn from N(0, I) when absent.
    std::optional<Vec> v;

    static InitialCondition fixed(Vec x, Vec v) { return {Position::Fixed, std::move(x), std::move(v)}; }
    static InitialCondition fixed_position(Vec x) { return {Position::Fixed, std::move(x), std::nullopt}; }
    /// x ~ mu_U (quadratic potentials only), v ~ N(0, I).
    static InitialCondition stationary() { return {Position::Stationary, {}, std::nullopt}; }

    PhaseState realize(const Potential& potential, VariateStream& rng) const;
};

/// Runs the event loop of `process` on [0, total_time].
Trajectory simulate(Process process, const Potential& potential, double gamma, double total_time,
                    const InitialCondition& init, VariateStream& rng, const SamplerConfig& cfg = {});

/// One row per segment: t, x1..xd, v1..vd, flow, event_kind.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace pdmp

#endif  // PDMP_SAMPLERS_HPP

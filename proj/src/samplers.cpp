#include "pdmp/samplers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pdmp/errors.hpp"
#include "pdmp/event_clock.hpp"

namespace pdmp {

std::string_view to_string(Process p)
{
    switch (p) {
    case Process::RHMC: return "rhmc";
    case Process::ZZ: return "zz";
    case Process::BPS: return "bps";
    }
    return "?";
}

Process parse_process(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "rhmc") return Process::RHMC;
    if (lower == "zz" || lower == "zigzag") return Process::ZZ;
    if (lower == "bps") return Process::BPS;
    throw std::invalid_argument("unknown process '" + std::string(name) + "' (expected rhmc, zz or bps)");
}

std::string_view to_string(EventKind k)
{
    switch (k) {
    case EventKind::Refresh: return "refresh";
    case EventKind::Bounce: return "bounce";
    case EventKind::SegmentMarker: return "marker";
    }
    return "?";
}

void HarmonicFlow::advance(std::span<double> x, std::span<double> v, double dt) const
{
    const auto& q = eigen_->vectors;
    const std::size_t d = x.size();
    Vec y(d), w(d);
    q.multiply_transposed(x, y);
    q.multiply_transposed(v, w);
    for (std::size_t j = 0; j < d; ++j) {
        const double omega = std::sqrt(eigen_->values[j]);
        const double c = std::cos(omega * dt);
        const double s = std::sin(omega * dt);
        const double yj = y[j];
        y[j] = yj * c + w[j] * s / omega;
        w[j] = -omega * yj * s + w[j] * c;
    }
    q.multiply(y, x);
    q.multiply(w, v);
}

void leapfrog_flow(const Potential& potential, std::span<double> x, std::span<double> v, double duration, double h,
                   std::vector<PhaseState>* substeps)
{
    if (!(h > 0.0)) throw std::invalid_argument("leapfrog_flow: step must be positive");
    const std::size_t d = x.size();
    Vec g(d);
    potential.value_and_gradient(x, g);
    double elapsed = 0.0;
    while (elapsed < duration) {
        const double step = std::min(h, duration - elapsed);
        for (std::size_t i = 0; i < d; ++i) v[i] -= 0.5 * step * g[i];
        for (std::size_t i = 0; i < d; ++i) x[i] += step * v[i];
        potential.value_and_gradient(x, g);
        for (std::size_t i = 0; i < d; ++i) v[i] -= 0.5 * step * g[i];
        elapsed += step;
        if (substeps && elapsed < duration) substeps->push_back({elapsed, Vec(x.begin(), x.end()), Vec(v.begin(), v.end())});
        if (duration - elapsed < 1e-14 * std::max(1.0, duration)) break;
    }
}

Trajectory::Trajectory(Process process, int dim, std::shared_ptr<const HarmonicFlow> harmonic)
    : process_(process), dim_(dim), harmonic_(std::move(harmonic))
{
}

std::span<const double> Trajectory::x(std::size_t i) const
{
    return {xs_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
}

std::span<const double> Trajectory::v(std::size_t i) const
{
    return {vs_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
}

void Trajectory::append_anchor(double t, std::span<const double> x, std::span<const double> v, FlowKind flow,
                               AnchorCause cause, int index)
{
    times_.push_back(t);
    xs_.insert(xs_.end(), x.begin(), x.end());
    vs_.insert(vs_.end(), v.begin(), v.end());
    flows_.push_back(flow);
    causes_.push_back(cause);
    cause_index_.push_back(index);
}

std::size_t Trajectory::segment_at(double t) const
{
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 0;
    return static_cast<std::size_t>(it - times_.begin()) - 1;
}

void Trajectory::state_in_segment(std::size_t i, double t, std::span<double> x, std::span<double> v) const
{
    const auto x0 = this->x(i);
    const auto v0 = this->v(i);
    const double dt = t - times_[i];
    const std::size_t d = x0.size();
    switch (flows_[i]) {
    case FlowKind::Linear:
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = x0[k] + dt * v0[k];
            v[k] = v0[k];
        }
        return;
    case FlowKind::HamiltonianAnalytic:
        std::copy(x0.begin(), x0.end(), x.begin());
        std::copy(v0.begin(), v0.end(), v.begin());
        if (dt != 0.0) harmonic_->advance(x, v, dt);
        return;
    case FlowKind::HamiltonianLeapfrog: {
        // linear interpolation between integrator anchors
        const bool last = i + 1 >= size();
        const auto x1 = last ? std::span<const double>(final_.x) : this->x(i + 1);
        const auto v1 = last ? std::span<const double>(final_.v) : this->v(i + 1);
        const double len = end_time(i) - times_[i];
        const double w = len > 0.0 ? dt / len : 0.0;
        // the next anchor may follow a refresh; its pre-refresh state is not
        // stored, so only positions are interpolated across it
        const bool continuous_v = last || causes_[i + 1] == AnchorCause::IntegratorStep;
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = (1.0 - w) * x0[k] + w * x1[k];
            v[k] = continuous_v ? (1.0 - w) * v0[k] + w * v1[k] : v0[k];
        }
        return;
    }
    }
}

Vec reflect(std::span<const double> v, std::span<const double> direction)
{
    Vec out(v.begin(), v.end());
    const double nn = dot(direction, direction);
    if (nn == 0.0) return out;
    const double scale = 2.0 * dot(v, direction) / nn;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= scale * direction[i];
    return out;
}

Vec refresh_velocity(int d, VariateStream& rng)
{
    if (d < 1) throw std::invalid_argument("refresh_velocity: d must be >= 1");
    Vec v(static_cast<std::size_t>(d));
    for (double& c : v) c = rng.normal();
    return v;
}

namespace {

struct Candidate {
    ArrivalTime time;
    EventKind kind = EventKind::Refresh;
    int index = -1;
};

void keep_earliest(Candidate& best, ArrivalTime t, EventKind kind, int index)
{
    if (t < best.time) best = {t, kind, index};
}

ArrivalTime refresh_clock(double gamma, VariateStream& rng)
{
    if (gamma < 0.0) throw std::invalid_argument("refreshment rate must be nonnegative");
    if (gamma == 0.0) return ArrivalTime::never();
    return sample_exponential(gamma, rng.uniform());
}

/// Straight-line flow with bounce clocks: the zigzag (one clock per
/// coordinate) and the BPS (one clock on the full gradient).
StepResult linear_advance(Process process, const PhaseState& state, const Potential& potential, double gamma,
                          VariateStream& rng, const SamplerConfig& cfg, double t_stop)
{
    const std::size_t d = state.x.size();
    const auto& x = state.x;
    const auto& v = state.v;
    const bool zigzag = process == Process::ZZ;

    Candidate best{refresh_clock(gamma, rng), EventKind::Refresh, -1};

    if (potential.kind() == PotentialKind::Quadratic) {
        const DenseMatrix& a = potential.matrix();
        if (zigzag) {
            for (std::size_t k = 0; k < d; ++k) {
                const double ak = v[k] * dot(a.row(k), x);
                const double ck = v[k] * dot(a.row(k), v);
                keep_earliest(best, first_arrival_affine(ak, ck, rng.exponential()), EventKind::Bounce,
                              static_cast<int>(k));
            }
        }
        else {
            keep_earliest(best, first_arrival_affine(a.bilinear(v, x), a.bilinear(v, v), rng.exponential()),
                          EventKind::Bounce, 0);
        }
    }
    else {
        const double horizon = cfg.thinning_horizon;
        Vec probe(d);
        auto clock = [&](BounceField field) {
            const auto rate = [&](double t) {
                for (std::size_t i = 0; i < d; ++i) probe[i] = x[i] + t * v[i];
                return bounce_rate(potential, probe, v, field);
            };
            const auto envelope = [&](double base, double span) {
                Vec anchor(d);
                for (std::size_t i = 0; i < d; ++i) anchor[i] = x[i] + base * v[i];
                return line_rate_envelope(potential, anchor, v, field, span);
            };
            const ArrivalOutcome out = first_arrival_thinning(rate, envelope, horizon, rng);
            keep_earliest(best, out.time, out.exhausted_horizon ? EventKind::SegmentMarker : EventKind::Bounce,
                          field.index);
        };
        if (zigzag)
            for (std::size_t k = 0; k < d; ++k) clock(BounceField::coordinate(static_cast<int>(k)));
        else
            clock(BounceField::gradient());
    }

    StepResult out;
    out.state = state;
    const double remaining = t_stop - state.t;
    double tau = best.time.value();
    if (best.time.is_never() || tau >= remaining) {
        if (!std::isfinite(remaining))
            throw std::runtime_error("no event can ever occur (zero refreshment and no bounce) and no stop time");
        tau = remaining;
        out.reached_stop = true;
        best.kind = EventKind::SegmentMarker;
        best.index = -1;
    }
    for (std::size_t i = 0; i < d; ++i) out.state.x[i] += tau * v[i];
    out.state.t = out.reached_stop ? t_stop : state.t + tau;

    EventRecord& ev = out.event;
    ev.time = out.state.t;
    ev.kind = best.kind;
    ev.index = best.index;
    ev.v_before = v;
    switch (best.kind) {
    case EventKind::Refresh:
        out.state.v = refresh_velocity(static_cast<int>(d), rng);
        break;
    case EventKind::Bounce:
        if (zigzag) {
            const auto k = static_cast<std::size_t>(best.index);
            if (potential.partial(out.state.x, best.index) != 0.0) out.state.v[k] = -out.state.v[k];
        }
        else {
            out.state.v = reflect(v, eval_grad(potential, out.state.x).grad);
        }
        break;
    case EventKind::SegmentMarker:
        break;
    }
    ev.v_after = out.state.v;
    return out;
}

double hamiltonian(const Potential& potential, std::span<const double> x, std::span<const double> v)
{
    return potential.value(x) + 0.5 * dot(v, v);
}

}  // namespace

StepResult zz_advance(const PhaseState& state, const Potential& potential, double gamma, VariateStream& rng,
                      const SamplerConfig& cfg, double t_stop)
{
    return linear_advance(Process::ZZ, state, potential, gamma, rng, cfg, t_stop);
}

StepResult bps_advance(const PhaseState& state, const Potential& potential, double gamma, VariateStream& rng,
                       const SamplerConfig& cfg, double t_stop)
{
    return linear_advance(Process::BPS, state, potential, gamma, rng, cfg, t_stop);
}

StepResult rhmc_advance(const PhaseState& state, const Potential& potential, double gamma, VariateStream& rng,
                        const SamplerConfig& cfg, double t_stop)
{
    const ArrivalTime refresh = refresh_clock(gamma, rng);
    const double remaining = t_stop - state.t;
    if (refresh.is_never() && !std::isfinite(remaining))
        throw std::runtime_error("rhmc_advance: zero refreshment rate and no stop time");

    StepResult out;
    out.state = state;
    const bool stop_first = refresh.is_never() || refresh.value() >= remaining;
    const double tau = stop_first ? remaining : refresh.value();

    if (potential.kind() == PotentialKind::Quadratic) {
        HarmonicFlow(potential.eigen_ptr()).advance(out.state.x, out.state.v, tau);
    }
    else {
        const double h0 = hamiltonian(potential, state.x, state.v);
        leapfrog_flow(potential, out.state.x, out.state.v, tau, cfg.leapfrog_step, &out.substeps);
        for (auto& s : out.substeps) s.t += state.t;
        const double h1 = hamiltonian(potential, out.state.x, out.state.v);
        if (std::abs(h1 - h0) > cfg.energy_drift_bound * std::max(1.0, std::abs(h0))) {
            std::ostringstream msg;
            msg << "leapfrog energy drift " << (h1 - h0) << " over a leg of length " << tau << " (h=" << cfg.leapfrog_step
                << ")";
            out.warning = msg.str();
        }
    }
    out.state.t = stop_first ? t_stop : state.t + tau;

    out.event.time = out.state.t;
    out.event.v_before = out.state.v;
    if (stop_first) {
        out.reached_stop = true;
        out.event.kind = EventKind::SegmentMarker;
    }
    else {
        out.event.kind = EventKind::Refresh;
        out.state.v = refresh_velocity(static_cast<int>(state.v.size()), rng);
    }
    out.event.v_after = out.state.v;
    return out;
}

PhaseState InitialCondition::realize(const Potential& potential, VariateStream& rng) const
{
    const int d = potential.dim();
    PhaseState s;
    if (position == Position::Stationary) {
        if (potential.kind() != PotentialKind::Quadratic)
            throw std::invalid_argument("stationary initial positions need a quadratic potential");
        // x = Q diag(lambda^{-1/2}) z
        const SymmetricEigen& eig = potential.eigen();
        Vec z(static_cast<std::size_t>(d));
        for (std::size_t j = 0; j < z.size(); ++j) z[j] = rng.normal() / std::sqrt(eig.values[j]);
        s.x = eig.vectors.multiply(z);
    }
    else {
        if (static_cast<int>(x.size()) != d) throw std::invalid_argument("initial position has the wrong dimension");
        s.x = x;
    }
    if (v) {
        if (static_cast<int>(v->size()) != d) throw std::invalid_argument("initial velocity has the wrong dimension");
        s.v = *v;
    }
    else {
        s.v = refresh_velocity(d, rng);
    }
    return s;
}

Trajectory simulate(Process process, const Potential& potential, double gamma, double total_time,
                    const InitialCondition& init, VariateStream& rng, const SamplerConfig& cfg)
{
    if (!(total_time > 0.0)) throw std::invalid_argument("simulate: total_time must be positive");
    if (gamma < 0.0) throw std::invalid_argument("simulate: gamma must be nonnegative");
    if (process == Process::RHMC && gamma == 0.0) throw std::invalid_argument("simulate: RHMC needs gamma > 0");

    FlowKind flow = FlowKind::Linear;
    std::shared_ptr<const HarmonicFlow> harmonic;
    if (process == Process::RHMC) {
        if (potential.kind() == PotentialKind::Quadratic) {
            flow = FlowKind::HamiltonianAnalytic;
            harmonic = std::make_shared<HarmonicFlow>(potential.eigen_ptr());
        }
        else {
            flow = FlowKind::HamiltonianLeapfrog;
        }
    }

    Trajectory traj(process, potential.dim(), harmonic);
    PhaseState state = init.realize(potential, rng);
    state.t = 0.0;
    traj.append_anchor(0.0, state.x, state.v, flow, AnchorCause::Start);

    constexpr std::size_t kMaxWarnings = 20;
    while (state.t < total_time) {
        StepResult step;
        switch (process) {
        case Process::RHMC: step = rhmc_advance(state, potential, gamma, rng, cfg, total_time); break;
        case Process::ZZ: step = zz_advance(state, potential, gamma, rng, cfg, total_time); break;
        case Process::BPS: step = bps_advance(state, potential, gamma, rng, cfg, total_time); break;
        }
        for (const auto& s : step.substeps)
            traj.append_anchor(s.t, s.x, s.v, flow, AnchorCause::IntegratorStep);
        if (step.warning && traj.warnings().size() < kMaxWarnings) traj.add_warning(*step.warning);
        state = std::move(step.state);
        if (step.reached_stop) break;

        auto& counts = traj.mutable_counts();
        AnchorCause cause = AnchorCause::Marker;
        switch (step.event.kind) {
        case EventKind::Refresh: ++counts.refresh; cause = AnchorCause::Refresh; break;
        case EventKind::Bounce: ++counts.bounce; cause = AnchorCause::Bounce; break;
        case EventKind::SegmentMarker: ++counts.marker; break;
        }
        traj.append_anchor(state.t, state.x, state.v, flow, cause, step.event.index);
        if (cfg.record_events) traj.record_event(std::move(step.event));
    }
    state.t = total_time;
    traj.finish(std::move(state));
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out)
{
    const int d = traj.dim();
    out << "t";
    for (int i = 1; i <= d; ++i) out << ",x" << i;
    for (int i = 1; i <= d; ++i) out << ",v" << i;
    out << ",flow,event_kind\n";
    out.precision(17);
    for (std::size_t s = 0; s < traj.size(); ++s) {
        out << traj.time(s);
        for (double c : traj.x(s)) out << ',' << c;
        for (double c : traj.v(s)) out << ',' << c;
        switch (traj.flow(s)) {
        case FlowKind::Linear: out << ",linear"; break;
        case FlowKind::HamiltonianAnalytic: out << ",hamiltonian_analytic"; break;
        case FlowKind::HamiltonianLeapfrog: out << ",hamiltonian_leapfrog"; break;
        }
        switch (traj.cause(s)) {
        case AnchorCause::Start: out << ",start"; break;
        case AnchorCause::Refresh: out << ",refresh"; break;
        case AnchorCause::Bounce: out << ",bounce:" << traj.cause_index(s) + 1; break;
        case AnchorCause::Marker: out << ",marker"; break;
        case AnchorCause::IntegratorStep: out << ",step"; break;
        }
        out << '\n';
    }
}

}  // namespace pdmp

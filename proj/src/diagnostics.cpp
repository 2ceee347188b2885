#include "pdmp/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pdmp/errors.hpp"

namespace pdmp {

Observable Observable::constant(int dim, double c)
{
    Observable o(dim);
    const auto n = static_cast<std::size_t>(dim);
    o.terms_.push_back({c, std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0)});
    return o;
}

Observable Observable::position(int dim, int i)
{
    if (i < 0 || i >= dim) throw std::out_of_range("Observable::position: index out of range");
    Observable o = constant(dim, 1.0);
    o.terms_[0].x_pow[static_cast<std::size_t>(i)] = 1;
    return o;
}

Observable Observable::velocity(int dim, int i)
{
    if (i < 0 || i >= dim) throw std::out_of_range("Observable::velocity: index out of range");
    Observable o = constant(dim, 1.0);
    o.terms_[0].v_pow[static_cast<std::size_t>(i)] = 1;
    return o;
}

int Observable::degree() const
{
    int deg = 0;
    for (const auto& t : terms_) {
        int s = 0;
        for (auto p : t.x_pow) s += p;
        for (auto p : t.v_pow) s += p;
        deg = std::max(deg, s);
    }
    return deg;
}

double Observable::operator()(std::span<const double> x, std::span<const double> v) const
{
    double total = 0.0;
    for (const auto& t : terms_) {
        double prod = t.coef;
        for (std::size_t i = 0; i < t.x_pow.size(); ++i)
            for (int p = 0; p < t.x_pow[i]; ++p) prod *= x[i];
        for (std::size_t i = 0; i < t.v_pow.size(); ++i)
            for (int p = 0; p < t.v_pow[i]; ++p) prod *= v[i];
        total += prod;
    }
    return total;
}

Observable Observable::operator+(const Observable& o) const
{
    if (o.dim_ != dim_) throw std::invalid_argument("Observable: dimension mismatch");
    Observable r = *this;
    r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
    return r;
}

Observable Observable::operator*(const Observable& o) const
{
    if (o.dim_ != dim_) throw std::invalid_argument("Observable: dimension mismatch");
    Observable r(dim_);
    for (const auto& a : terms_) {
        for (const auto& b : o.terms_) {
            Term t = a;
            t.coef *= b.coef;
            for (std::size_t i = 0; i < t.x_pow.size(); ++i) {
                t.x_pow[i] = static_cast<std::uint8_t>(t.x_pow[i] + b.x_pow[i]);
                t.v_pow[i] = static_cast<std::uint8_t>(t.v_pow[i] + b.v_pow[i]);
            }
            r.terms_.push_back(std::move(t));
        }
    }
    return r;
}

Observable Observable::operator*(double s) const
{
    Observable r = *this;
    for (auto& t : r.terms_) t.coef *= s;
    return r;
}

PhaseState position_at(const Trajectory& traj, double t)
{
    if (!(t >= 0.0 && t <= traj.total_time())) {
        std::ostringstream msg;
        msg << "position_at: t=" << t << " outside [0, " << traj.total_time() << "]";
        throw std::out_of_range(msg.str());
    }
    PhaseState s;
    s.t = t;
    s.x.resize(static_cast<std::size_t>(traj.dim()));
    s.v.resize(s.x.size());
    traj.state_in_segment(traj.segment_at(t), t, s.x, s.v);
    return s;
}

namespace {

constexpr std::array<double, 3> kGaussNodes = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussWeights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
constexpr double kHarmonicPiece = 0.1;

/// Calls visit(weight, x, v) for each quadrature node of the path over
/// [a, b]; the weights integrate over time.
template <class Visit>
void for_each_node(const Trajectory& traj, double a, double b, Visit&& visit)
{
    const auto d = static_cast<std::size_t>(traj.dim());
    Vec x(d), v(d);
    auto gauss = [&](std::size_t seg, double lo, double hi) {
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        for (std::size_t q = 0; q < 3; ++q) {
            traj.state_in_segment(seg, mid + half * kGaussNodes[q], x, v);
            visit(half * kGaussWeights[q], x, v);
        }
    };
    for (std::size_t seg = traj.segment_at(a); seg < traj.size(); ++seg) {
        const double lo = std::max(a, traj.time(seg));
        const double hi = std::min(b, traj.end_time(seg));
        if (traj.time(seg) >= b) break;
        if (hi <= lo) continue;
        if (traj.flow(seg) == FlowKind::HamiltonianAnalytic) {
            const auto pieces = static_cast<std::size_t>(std::ceil((hi - lo) / kHarmonicPiece));
            const double step = (hi - lo) / static_cast<double>(pieces);
            for (std::size_t p = 0; p < pieces; ++p) gauss(seg, lo + p * step, p + 1 == pieces ? hi : lo + (p + 1) * step);
        }
        else {
            gauss(seg, lo, hi);
        }
    }
}

void check_degree(const Observable& f, const Trajectory& traj)
{
    if (f.dim() != traj.dim()) throw std::invalid_argument("observable dimension does not match the trajectory");
    if (f.degree() > 5)
        throw UnsupportedObservable("observable degree " + std::to_string(f.degree()) +
                                    " exceeds the exact quadrature degree 5");
}

}  // namespace

double integrate(const Trajectory& traj, const Observable& f, double a, double b)
{
    check_degree(f, traj);
    if (traj.size() == 0) throw std::invalid_argument("integrate: empty trajectory");
    if (a < 0.0 || b > traj.total_time() || a > b) throw std::out_of_range("integrate: interval outside the path");
    double total = 0.0;
    for_each_node(traj, a, b, [&](double w, std::span<const double> x, std::span<const double> v) { total += w * f(x, v); });
    return total;
}

double segment_time_average(const Trajectory& traj, const Observable& f)
{
    return integrate(traj, f, 0.0, traj.total_time()) / traj.total_time();
}

std::vector<double> sample_on_grid(const Trajectory& traj, const Observable& f, std::span<const double> grid)
{
    std::vector<double> out(grid.size());
    const auto d = static_cast<std::size_t>(traj.dim());
    Vec x(d), v(d);
    std::size_t seg = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double t = grid[g];
        if (!(t >= 0.0 && t <= traj.total_time())) throw std::out_of_range("sample_on_grid: grid point outside the path");
        while (seg + 1 < traj.size() && traj.time(seg + 1) <= t) ++seg;
        traj.state_in_segment(seg, t, x, v);
        out[g] = f(x, v);
    }
    return out;
}

void CurveAccumulator::add(std::span<const double> values)
{
    if (values.size() != mean_.size()) throw std::invalid_argument("CurveAccumulator: size mismatch");
    ++n_;
    const double k = static_cast<double>(n_);
    for (std::size_t g = 0; g < values.size(); ++g) {
        const double delta = values[g] - mean_[g];
        mean_[g] += delta / k;
        m2_[g] += delta * (values[g] - mean_[g]);
    }
}

void CurveAccumulator::merge(const CurveAccumulator& other)
{
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    if (other.mean_.size() != mean_.size()) throw std::invalid_argument("CurveAccumulator: size mismatch");
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    for (std::size_t g = 0; g < mean_.size(); ++g) {
        const double delta = other.mean_[g] - mean_[g];
        mean_[g] += delta * nb / n;
        m2_[g] += other.m2_[g] + delta * delta * na * nb / n;
    }
    n_ += other.n_;
}

ObservableCurve CurveAccumulator::finish(std::span<const double> grid) const
{
    if (grid.size() != mean_.size()) throw std::invalid_argument("CurveAccumulator: grid size mismatch");
    ObservableCurve curve;
    curve.grid.assign(grid.begin(), grid.end());
    curve.n_chains = static_cast<int>(n_);
    curve.mean = mean_;
    curve.std_error.assign(mean_.size(), 0.0);
    if (n_ > 1) {
        const double k = static_cast<double>(n_);
        for (std::size_t g = 0; g < mean_.size(); ++g) curve.std_error[g] = std::sqrt(std::max(0.0, m2_[g]) / (k - 1.0) / k);
    }
    return curve;
}

ObservableCurve ensemble_mean_curve(std::span<const Trajectory> trajs, const Observable& f,
                                    std::span<const double> grid)
{
    if (trajs.empty()) throw std::invalid_argument("ensemble_mean_curve: no trajectories");
    CurveAccumulator acc(grid.size());
    for (const auto& traj : trajs) {
        if (traj.dim() != f.dim()) throw std::invalid_argument("ensemble_mean_curve: mismatched dimensions");
        acc.add(sample_on_grid(traj, f, grid));
    }
    return acc.finish(grid);
}

DecayFit fit_decay_rate(const ObservableCurve& curve, double target, FitWindow window, double noise_floor)
{
    if (!(window.t1 < window.t2)) throw std::invalid_argument("fit_decay_rate: window needs t1 < t2");
    std::vector<double> ts, ys;
    for (std::size_t g = 0; g < curve.grid.size(); ++g) {
        const double t = curve.grid[g];
        if (t < window.t1 || t > window.t2) continue;
        const double dev = std::abs(curve.mean[g] - target);
        const double se = g < curve.std_error.size() ? curve.std_error[g] : 0.0;
        if (dev > std::max(noise_floor, 3.0 * se)) {
            ts.push_back(t);
            ys.push_back(std::log(dev));
        }
    }
    if (ts.size() < 3) {
        std::ostringstream msg;
        msg << "only " << ts.size() << " points above the noise in [" << window.t1 << ", " << window.t2 << "]";
        throw InsufficientSignal(msg.str());
    }

    const double n = static_cast<double>(ts.size());
    double tbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tbar += ts[i];
        ybar += ys[i];
    }
    tbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxx += (ts[i] - tbar) * (ts[i] - tbar);
        sxy += (ts[i] - tbar) * (ys[i] - ybar);
        syy += (ys[i] - ybar) * (ys[i] - ybar);
    }
    const double slope = sxy / sxx;
    const double ssr = std::max(0.0, syy - slope * sxy);

    DecayFit fit;
    fit.nu_hat = -slope;
    fit.window = window;
    fit.points_used = static_cast<int>(ts.size());
    fit.std_error = ts.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    return fit;
}

ObservableCurve envelope_curve(const ObservableCurve& a, const ObservableCurve& b, double target_a, double target_b,
                               double weight_a)
{
    if (a.grid.size() != b.grid.size()) throw std::invalid_argument("envelope_curve: grids differ");
    ObservableCurve out;
    out.grid = a.grid;
    out.n_chains = a.n_chains;
    out.mean.resize(a.grid.size());
    out.std_error.resize(a.grid.size());
    for (std::size_t g = 0; g < a.grid.size(); ++g) {
        out.mean[g] = std::hypot(weight_a * (a.mean[g] - target_a), b.mean[g] - target_b);
        out.std_error[g] = std::hypot(weight_a * a.std_error[g], b.std_error[g]);
    }
    return out;
}

ObservableCurve local_maxima_curve(const ObservableCurve& curve, double target)
{
    ObservableCurve out;
    out.n_chains = curve.n_chains;
    const std::size_t n = curve.grid.size();
    for (std::size_t g = 1; g + 1 < n; ++g) {
        const double here = std::abs(curve.mean[g] - target);
        if (here >= std::abs(curve.mean[g - 1] - target) && here > std::abs(curve.mean[g + 1] - target)) {
            out.grid.push_back(curve.grid[g]);
            out.mean.push_back(here);
            out.std_error.push_back(curve.std_error[g]);
        }
    }
    return out;
}

FitWindow default_fit_window(const ObservableCurve& curve, double target, double nu_theory, double snr,
                             double start_fraction)
{
    if (curve.grid.empty()) throw std::invalid_argument("default_fit_window: empty curve");
    double t_dip = curve.grid.back();
    for (std::size_t g = 0; g < curve.grid.size(); ++g) {
        if (std::abs(curve.mean[g] - target) < snr * curve.std_error[g]) {
            t_dip = curve.grid[g];
            break;
        }
    }
    FitWindow w;
    if (!(start_fraction > 0.0 && start_fraction < 1.0))
        throw std::invalid_argument("default_fit_window: start_fraction must lie in (0, 1)");
    w.t1 = curve.grid.front() + start_fraction * (t_dip - curve.grid.front());
    if (nu_theory > 0.0) w.t1 = std::min(w.t1, 1.0 / nu_theory);
    w.t2 = t_dip;
    return w;
}

std::vector<MomentZ> moment_check(const Trajectory& traj, const Potential& target, int batches)
{
    if (target.kind() != PotentialKind::Quadratic) throw std::invalid_argument("moment_check: needs a quadratic target");
    if (target.dim() != traj.dim()) throw std::invalid_argument("moment_check: dimension mismatch");
    if (batches < 2) throw std::invalid_argument("moment_check: needs at least two batches");
    if (traj.size() < static_cast<std::size_t>(batches))
        throw std::invalid_argument("moment_check: trajectory too short for " + std::to_string(batches) + " batches");

    const auto d = static_cast<std::size_t>(traj.dim());
    // covariance of mu_U: A^{-1} = Q diag(1/lambda) Q^T
    const SymmetricEigen& eig = target.eigen();
    DenseMatrix cov(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k) cov(i, j) += eig.vectors(i, k) * eig.vectors(j, k) / eig.values[k];

    std::vector<MomentZ> moments;
    auto idx = [](std::size_t i) { return std::to_string(i + 1); };
    for (std::size_t i = 0; i < d; ++i) moments.push_back({"x" + idx(i), 0, 0.0, 0, 0});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) moments.push_back({"x" + idx(i) + "x" + idx(j), 0, cov(i, j), 0, 0});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) moments.push_back({"v" + idx(i) + "v" + idx(j), 0, i == j ? 1.0 : 0.0, 0, 0});
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) moments.push_back({"x" + idx(i) + "v" + idx(j), 0, 0.0, 0, 0});

    const std::size_t nm = moments.size();
    std::vector<double> acc(nm);
    std::vector<std::vector<double>> batch_means(static_cast<std::size_t>(batches), std::vector<double>(nm));
    const double total = traj.total_time();
    const double width = total / batches;
    for (int b = 0; b < batches; ++b) {
        std::fill(acc.begin(), acc.end(), 0.0);
        const double lo = b * width;
        const double hi = b + 1 == batches ? total : (b + 1) * width;
        for_each_node(traj, lo, hi, [&](double w, std::span<const double> x, std::span<const double> v) {
            std::size_t m = 0;
            for (std::size_t i = 0; i < d; ++i) acc[m++] += w * x[i];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i; j < d; ++j) acc[m++] += w * x[i] * x[j];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i; j < d; ++j) acc[m++] += w * v[i] * v[j];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) acc[m++] += w * x[i] * v[j];
        });
        for (std::size_t m = 0; m < nm; ++m) batch_means[static_cast<std::size_t>(b)][m] = acc[m] / (hi - lo);
    }

    const double nb = static_cast<double>(batches);
    for (std::size_t m = 0; m < nm; ++m) {
        double mean = 0.0;
        for (const auto& bm : batch_means) mean += bm[m];
        mean /= nb;
        double var = 0.0;
        for (const auto& bm : batch_means) var += (bm[m] - mean) * (bm[m] - mean);
        var /= nb - 1.0;
        auto& mz = moments[m];
        mz.estimate = mean;
        mz.std_error = std::sqrt(var / nb);
        const double dev = mean - mz.truth;
        mz.z = mz.std_error > 0.0 ? dev / mz.std_error : (dev == 0.0 ? 0.0 : std::copysign(kInf, dev));
    }
    return moments;
}

}  // namespace pdmp

#ifndef PDMP_DIAGNOSTICS_HPP
#define PDMP_DIAGNOSTICS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pdmp/potential.hpp"
#include "pdmp/samplers.hpp"

namespace pdmp {

/// Polynomial in (x, v).
class Observable {
public:
    struct Term {
        double coef = 0.0;
        std::vector<std::uint8_t> x_pow;
        std::vector<std::uint8_t> v_pow;
    };

    explicit Observable(int dim) : dim_(dim) {}

    static Observable constant(int dim, double c);
    /// x_i, zero-based.
    static Observable position(int dim, int i);
    static Observable velocity(int dim, int i);

    int dim() const { return dim_; }
    int degree() const;
    const std::vector<Term>& terms() const { return terms_; }

    double operator()(std::span<const double> x, std::span<const double> v) const;

    Observable operator+(const Observable& o) const;
    Observable operator*(const Observable& o) const;
    Observable operator*(double s) const;

private:
    int dim_;
    std::vector<Term> terms_;
};

/// State of the path at time t in [0, total_time]. Leapfrog segments are
/// interpolated linearly between integrator steps (approximate).
PhaseState position_at(const Trajectory& traj, double t);

/// Integral of f along the path over [a, b] by 3-point Gauss-Legendre per
/// segment (exact up to degree 5 on linear and leapfrog segments); analytic
/// Hamiltonian segments are subdivided at 0.1 first.
double integrate(const Trajectory& traj, const Observable& f, double a, double b);

/// (1/T) * integral over [0, T] of f.
double segment_time_average(const Trajectory& traj, const Observable& f);

struct ObservableCurve {
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> std_error;
    int n_chains = 0;
};

/// Per-grid-point running mean and centered sum of squares (Welford, with
/// the pairwise merge), so identical inputs give exactly zero spread.
class CurveAccumulator {
public:
    explicit CurveAccumulator(std::size_t points = 0) : mean_(points, 0.0), m2_(points, 0.0) {}

    void add(std::span<const double> values);
    void merge(const CurveAccumulator& other);
    std::int64_t count() const { return n_; }
    ObservableCurve finish(std::span<const double> grid) const;

private:
    std::int64_t n_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

/// Evaluates `f` along the path at every grid point (grid must be sorted).
std::vector<double> sample_on_grid(const Trajectory& traj, const Observable& f, std::span<const double> grid);

/// Cross-chain mean and standard error of f(X_t) on the grid.
ObservableCurve ensemble_mean_curve(std::span<const Trajectory> trajs, const Observable& f,
                                    std::span<const double> grid);

struct FitWindow {
    double t1 = 0.0;
    double t2 = 0.0;
};

struct DecayFit {
    double nu_hat = 0.0;
    double std_error = 0.0;
    FitWindow window;
    int points_used = 0;
    double r_squared = 0.0;
};

/// nu_hat = -slope of the least-squares line through (t, ln|mean - target|)
/// over the window, keeping points above max(noise_floor, 3 stderr). Throws
/// InsufficientSignal with fewer than three usable points.
DecayFit fit_decay_rate(const ObservableCurve& curve, double target, FitWindow window, double noise_floor = 0.0);

/// Magnitude |(w (a - target_a), b - target_b)| of a pair of curves, with
/// the combined standard error. Tracks the envelope of oscillatory decay;
/// for a position/velocity pair w = sqrt(curvature) balances the two.
ObservableCurve envelope_curve(const ObservableCurve& a, const ObservableCurve& b, double target_a = 0.0,
                               double target_b = 0.0, double weight_a = 1.0);

/// Local maxima of |mean - target| (as a curve with target 0).
ObservableCurve local_maxima_curve(const ObservableCurve& curve, double target = 0.0);

/// Ends at t_dip, where |mean - target| first drops below `snr` stderr, and
/// starts at min(1/nu_theory, start_fraction * t_dip) to skip the initial
/// transient.
FitWindow default_fit_window(const ObservableCurve& curve, double target, double nu_theory, double snr = 3.0,
                             double start_fraction = 0.5);

struct MomentZ {
    std::string name;
    double estimate = 0.0;
    double truth = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

/// Time averages of x, x x^T, v v^T and x v^T against 0, A^{-1}, I and 0,
/// with batch-means standard errors over `batches` equal time batches.
std::vector<MomentZ> moment_check(const Trajectory& traj, const Potential& quadratic_target, int batches = 30);

}  // namespace pdmp

#endif  // PDMP_DIAGNOSTICS_HPP

#ifndef PDMP_SPECTRAL_HPP
#define PDMP_SPECTRAL_HPP

#include <span>
#include <vector>

#include "pdmp/linalg.hpp"
#include "pdmp/samplers.hpp"

namespace pdmp {

// Backward Kolmogorov propagation for U = m x^2 / 2 in 1D, on the orthonormal
// basis psi_ip(x, v) = He_i(sqrt(m) x) He_p(v) of L^2(mu_U x N(0,1)), with
// He_k the normalized probabilists' Hermite polynomials. A coefficient array
// is n x n, row-major, row = x degree, column = v degree. In 1D the BPS and
// the zigzag have the same generator.

struct GeneratorOptions {
    /// Off leaves only the refreshment term (diagonal {0, -gamma}).
    bool transport = true;
    int quadrature_nodes = 200;
};

class TruncatedGenerator {
public:
    Process process() const { return process_; }
    double m_target() const { return m_; }
    double gamma() const { return gamma_; }
    int n_trunc() const { return n_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_); }

    /// out = L in. Both spans have size().
    void apply(std::span<const double> in, std::span<double> out) const;

    /// The full size() x size() matrix (column j = L e_j); for tests.
    DenseMatrix dense() const;

    /// ||f - Pi_v f||^2: the squared mass on v-degree >= 1.
    double non_equilibrium_mass(std::span<const double> c) const;

private:
    friend TruncatedGenerator assemble_generator_1d(Process, double, double, int, const GeneratorOptions&);

    Process process_ = Process::RHMC;
    double m_ = 1.0;
    double gamma_ = 1.0;
    int n_ = 0;
    bool transport_ = true;
    // <He_i, |y| He_j> in full, plus its odd-odd block for the v side
    std::vector<double> abs_full_;
    std::vector<double> abs_odd_;
    mutable std::vector<double> scratch_a_;
    mutable std::vector<double> scratch_b_;
};

TruncatedGenerator assemble_generator_1d(Process process, double m_target, double gamma, int n_trunc,
                                         const GeneratorOptions& options = {});

/// A[i][j] = E[|Y| He_i(Y) He_j(Y)], Y ~ N(0,1), by half-line Gauss-Laguerre
/// quadrature in s = y^2/2 (the integrand is smooth there, unlike in y).
DenseMatrix abs_moment_matrix(int n, int nodes = 200);

/// Largest ratio ||L^k b|| / ||L^(k-1) b|| over `iterations` power steps
/// from a fixed start vector.
double spectral_radius_estimate(const TruncatedGenerator& gen, int iterations = 20);

/// Largest step the propagator accepts: 0.1 / spectral_radius_estimate.
double max_stable_dt(const TruncatedGenerator& gen);

/// Unit coefficient on He_1(sqrt(m) x): the mean-zero position mode.
std::vector<double> position_mode(const TruncatedGenerator& gen);

struct NormPoint {
    double t = 0.0;
    double norm = 0.0;
};

struct SpectralDecay {
    double nu_spec = 0.0;
    double r_squared = 0.0;
    double dt = 0.0;
    long steps = 0;
    /// Subsampled ||f(t)||, including both endpoints.
    std::vector<NormPoint> norm_curve;
    /// max over steps of (||f_{k+1}|| - ||f_k||) / ||f0||.
    double max_norm_increase = 0.0;
    /// max over steps of (D + 2 gamma dt q) / ||f0||^2, where D is the change
    /// in ||f||^2 and q the trapezoid average of ||f - Pi_v f||^2. Nonpositive
    /// up to time-stepping error when the energy inequality holds.
    double max_energy_excess = 0.0;
    /// max over steps of |D + 2 gamma dt q| / ||f0||^2; the identity holds
    /// with equality for RHMC.
    double max_energy_gap = 0.0;
};

/// Integrates df/dt = L f with classical RK4 from f0 over [0, horizon] and
/// fits ln||f(t)|| by least squares over [horizon/2, horizon]. Throws
/// std::invalid_argument if f0 has a (0,0) component or dt > max_stable_dt.
SpectralDecay decay_rate_spectral(const TruncatedGenerator& gen, std::span<const double> f0, double horizon,
                                  double dt, std::size_t curve_points = 400);

}  // namespace pdmp

#endif  // PDMP_SPECTRAL_HPP

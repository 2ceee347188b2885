#include "pdmp/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pdmp {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

/// Gauss-Laguerre rule (weight e^{-s} on [0, inf)). Nodes from the Jacobi
/// matrix, polished by Newton; weights from the Christoffel sum
/// 1 / sum_{j<n} L_j(s)^2, which stays accurate for the tiny tail weights
/// where eigenvector components would not.
void gauss_laguerre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
    for (int k = 1; k < n; ++k) sub[k - 1] = k;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

    // L_n(s), L_{n+1}(s) and sum_{j<n} L_j(s)^2 by the three-term
    // recurrence, rescaled on the fly. Returns the log of the factor the
    // polynomial values carry (the sum carries it twice).
    auto laguerre = [n](double s, double& ln, double& ln1, double& sum_sq) {
        double prev = 1.0, cur = 1.0 - s, log_scale = 0.0;
        sum_sq = 1.0;
        for (int k = 1; k < n; ++k) {
            sum_sq += cur * cur;
            const double next = ((2.0 * k + 1.0 - s) * cur - k * prev) / (k + 1.0);
            prev = cur;
            cur = next;
            if (std::abs(cur) > 1e100) {
                prev *= 1e-100;
                cur *= 1e-100;
                sum_sq *= 1e-200;
                log_scale += 100.0 * std::numbers::ln10;
            }
        }
        ln = cur;
        ln1 = ((2.0 * n + 1.0 - s) * cur - n * prev) / (n + 1.0);
        return log_scale;
    };

    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double s = solver.eigenvalues()[k];
        double ln = 0.0, ln1 = 0.0, sum_sq = 0.0;
        for (int it = 0; it < 4; ++it) {
            laguerre(s, ln, ln1, sum_sq);
            // s L_n'(s) = (n+1) L_{n+1}(s) - (n+1-s) L_n(s)
            const double deriv = ((n + 1.0) * ln1 - (n + 1.0 - s) * ln) / s;
            const double step = ln / deriv;
            if (!std::isfinite(step)) break;
            s -= step;
            if (std::abs(step) <= 1e-16 * s) break;
        }
        const double log_scale = laguerre(s, ln, ln1, sum_sq);
        nodes[static_cast<std::size_t>(k)] = s;
        weights[static_cast<std::size_t>(k)] = std::exp(-std::log(sum_sq) - 2.0 * log_scale);
    }
}

}  // namespace

DenseMatrix abs_moment_matrix(int n, int nodes)
{
    if (n < 1 || nodes < 2) throw std::invalid_argument("abs_moment_matrix: needs n >= 1 and nodes >= 2");
    std::vector<double> s, w;
    gauss_laguerre(nodes, s, w);

    // E|Y| g(Y) = 2/sqrt(2 pi) * int_0^inf g(sqrt(2 s)) e^{-s} ds for even g
    const double scale = 2.0 / std::sqrt(2.0 * std::numbers::pi);
    const auto nn = static_cast<std::size_t>(n);
    DenseMatrix a(nn, nn);
    std::vector<double> h(nn);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (w[k] == 0.0) continue;
        const double y = std::sqrt(2.0 * s[k]);
        h[0] = 1.0;
        if (nn > 1) h[1] = y;
        for (std::size_t j = 1; j + 1 < nn; ++j)
            h[j + 1] = (y * h[j] - std::sqrt(static_cast<double>(j)) * h[j - 1]) / std::sqrt(j + 1.0);
        for (std::size_t i = 0; i < nn; ++i)
            for (std::size_t j = i % 2; j < nn; j += 2) a(i, j) += scale * w[k] * h[i] * h[j];
    }
    return a;
}

TruncatedGenerator assemble_generator_1d(Process process, double m_target, double gamma, int n_trunc,
                                         const GeneratorOptions& options)
{
    if (n_trunc < 2) throw std::invalid_argument("assemble_generator_1d: n_trunc must be at least 2");
    if (!(m_target > 0.0)) throw std::invalid_argument("assemble_generator_1d: m_target must be positive");
    if (!(gamma >= 0.0)) throw std::invalid_argument("assemble_generator_1d: gamma must be nonnegative");

    TruncatedGenerator g;
    g.process_ = process;
    g.m_ = m_target;
    g.gamma_ = gamma;
    g.n_ = n_trunc;
    g.transport_ = options.transport;
    const auto n = static_cast<std::size_t>(n_trunc);
    if (process != Process::RHMC && options.transport) {
        const DenseMatrix a = abs_moment_matrix(n_trunc, options.quadrature_nodes);
        g.abs_full_.assign(a.data().begin(), a.data().end());
        const std::size_t h = n / 2;
        g.abs_odd_.resize(h * h);
        for (std::size_t j = 0; j < h; ++j)
            for (std::size_t k = 0; k < h; ++k) g.abs_odd_[j * h + k] = a(2 * j + 1, 2 * k + 1);
        g.scratch_a_.resize(n * h);
        g.scratch_b_.resize(n * h);
    }
    return g;
}

void TruncatedGenerator::apply(std::span<const double> in, std::span<double> out) const
{
    const auto n = static_cast<std::size_t>(n_);
    if (in.size() != n * n || out.size() != n * n) throw std::invalid_argument("TruncatedGenerator::apply: size mismatch");
    ConstMap c(in.data(), n_, n_);
    MutMap o(out.data(), n_, n_);
    o.setZero();
    auto sq = [](std::size_t k) { return std::sqrt(static_cast<double>(k)); };
    const double sm = std::sqrt(m_);

    if (transport_) {
        // v d/dx: lowers the x degree, multiplies by v
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t p = 0; p < n; ++p) {
                double val = 0.0;
                if (p >= 1) val += sq(p) * c(i + 1, p - 1);
                if (p + 1 < n) val += sq(p + 1) * c(i + 1, p + 1);
                o(i, p) += sm * sq(i + 1) * val;
            }
        }
        if (process_ == Process::RHMC) {
            // -U'(x) d/dv
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t p = 0; p + 1 < n; ++p) {
                    double val = 0.0;
                    if (i >= 1) val += sq(i) * c(i - 1, p + 1);
                    if (i + 1 < n) val += sq(i + 1) * c(i + 1, p + 1);
                    o(i, p) -= sm * sq(p + 1) * val;
                }
            }
        }
        else {
            // (v U')_+ (flip - 1) = sqrt(m)/2 (y w + |y||w|)(flip - 1), and
            // flip - 1 = -2 on odd v degrees, 0 on even ones.
            // y w part: -sqrt(m) Y C Odd Y
            RowMat mid = RowMat::Zero(n_, n_);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t p = 0; p < n; ++p) {
                    double val = 0.0;
                    if (p >= 1 && (p - 1) % 2 == 1) val += sq(p) * c(i, p - 1);
                    if (p + 1 < n && (p + 1) % 2 == 1) val += sq(p + 1) * c(i, p + 1);
                    mid(i, p) = val;
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t p = 0; p < n; ++p) {
                    double val = 0.0;
                    if (i >= 1) val += sq(i) * mid(i - 1, p);
                    if (i + 1 < n) val += sq(i + 1) * mid(i + 1, p);
                    o(i, p) -= sm * val;
                }
            }
            // |y||w| part: -sqrt(m) A C Odd A; only odd v columns survive
            const auto h = static_cast<Eigen::Index>(n / 2);
            MutMap codd(scratch_a_.data(), n_, h);
            MutMap tmp(scratch_b_.data(), n_, h);
            for (Eigen::Index j = 0; j < h; ++j) codd.col(j) = c.col(2 * j + 1);
            ConstMap aoo(abs_odd_.data(), h, h);
            ConstMap afull(abs_full_.data(), n_, n_);
            tmp.noalias() = codd * aoo;
            codd.noalias() = afull * tmp;
            for (Eigen::Index j = 0; j < h; ++j) o.col(2 * j + 1) -= sm * codd.col(j);
        }
    }

    if (gamma_ > 0.0) o.rightCols(n_ - 1) -= gamma_ * c.rightCols(n_ - 1);
}

DenseMatrix TruncatedGenerator::dense() const
{
    const std::size_t dim = size();
    DenseMatrix mat(dim, dim);
    std::vector<double> e(dim, 0.0), col(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        e[j] = 1.0;
        apply(e, col);
        e[j] = 0.0;
        for (std::size_t i = 0; i < dim; ++i) mat(i, j) = col[i];
    }
    return mat;
}

double TruncatedGenerator::non_equilibrium_mass(std::span<const double> c) const
{
    const auto n = static_cast<std::size_t>(n_);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 1; p < n; ++p) total += c[i * n + p] * c[i * n + p];
    return total;
}

double spectral_radius_estimate(const TruncatedGenerator& gen, int iterations)
{
    const std::size_t dim = gen.size();
    std::mt19937_64 eng(0x5eed5eedULL);
    std::normal_distribution<double> normal;
    std::vector<double> b(dim), lb(dim);
    for (auto& x : b) x = normal(eng);
    double nb = norm(b);
    double rho = 0.0;
    for (int it = 0; it < iterations; ++it) {
        for (auto& x : b) x /= nb;
        gen.apply(b, lb);
        const double nl = norm(lb);
        rho = std::max(rho, nl);
        if (nl == 0.0) break;
        std::swap(b, lb);
        nb = nl;
    }
    return rho;
}

double max_stable_dt(const TruncatedGenerator& gen)
{
    const double rho = spectral_radius_estimate(gen);
    return rho > 0.0 ? 0.1 / rho : kInf;
}

std::vector<double> position_mode(const TruncatedGenerator& gen)
{
    std::vector<double> f(gen.size(), 0.0);
    f[static_cast<std::size_t>(gen.n_trunc())] = 1.0;
    return f;
}

SpectralDecay decay_rate_spectral(const TruncatedGenerator& gen, std::span<const double> f0, double horizon,
                                  double dt, std::size_t curve_points)
{
    const std::size_t dim = gen.size();
    if (f0.size() != dim) throw std::invalid_argument("decay_rate_spectral: f0 has the wrong size");
    const double n0 = norm(f0);
    if (!(n0 > 0.0)) throw std::invalid_argument("decay_rate_spectral: f0 is zero");
    if (std::abs(f0[0]) > 1e-12 * n0) throw std::invalid_argument("decay_rate_spectral: f0 is not mean-zero");
    if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("decay_rate_spectral: horizon and dt must be positive");
    const double dt_max = max_stable_dt(gen);
    if (dt > dt_max)
        throw std::invalid_argument("decay_rate_spectral: dt=" + std::to_string(dt) + " exceeds 0.1/rho=" +
                                    std::to_string(dt_max));

    SpectralDecay out;
    const long steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
    const double h = horizon / static_cast<double>(steps);
    out.dt = h;
    out.steps = steps;
    const long stride = std::max<long>(1, steps / static_cast<long>(std::max<std::size_t>(curve_points, 1)));

    std::vector<double> f(f0.begin(), f0.end()), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    double nf = n0;
    double q = gen.non_equilibrium_mass(f);
    const double gamma = gen.gamma();
    const double e0 = n0 * n0;
    double s_t = 0, s_y = 0, s_tt = 0, s_ty = 0, s_yy = 0, s_n = 0;
    auto accumulate = [&](double t, double nrm) {
        if (t + 1e-12 < 0.5 * horizon || nrm <= 0.0) return;
        const double y = std::log(nrm);
        s_n += 1;
        s_t += t;
        s_y += y;
        s_tt += t * t;
        s_ty += t * y;
        s_yy += y * y;
    };
    out.norm_curve.push_back({0.0, n0});
    accumulate(0.0, n0);
    out.max_norm_increase = -kInf;
    out.max_energy_excess = -kInf;

    for (long s = 1; s <= steps; ++s) {
        gen.apply(f, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = f[i] + 0.5 * h * k1[i];
        gen.apply(tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = f[i] + 0.5 * h * k2[i];
        gen.apply(tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = f[i] + h * k3[i];
        gen.apply(tmp, k4);
        for (std::size_t i = 0; i < dim; ++i) f[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        const double nf_new = norm(f);
        const double q_new = gen.non_equilibrium_mass(f);
        const double balance = (nf_new * nf_new - nf * nf + gamma * h * (q + q_new)) / e0;
        out.max_norm_increase = std::max(out.max_norm_increase, (nf_new - nf) / n0);
        out.max_energy_excess = std::max(out.max_energy_excess, balance);
        out.max_energy_gap = std::max(out.max_energy_gap, std::abs(balance));
        nf = nf_new;
        q = q_new;

        const double t = s == steps ? horizon : static_cast<double>(s) * h;
        accumulate(t, nf);
        if (s % stride == 0 || s == steps) out.norm_curve.push_back({t, nf});
    }

    if (s_n >= 2) {
        const double sxx = s_tt - s_t * s_t / s_n;
        const double sxy = s_ty - s_t * s_y / s_n;
        const double syy = s_yy - s_y * s_y / s_n;
        const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
        out.nu_spec = -slope;
        out.r_squared = syy > 1e-300 ? std::clamp(slope * sxy / syy, 0.0, 1.0) : 1.0;
    }
    return out;
}

}  // namespace pdmp

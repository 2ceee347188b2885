#include "pdmp/rates.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace pdmp {

namespace {

void check_common(double m, int d)
{
    if (!(m > 0.0)) throw std::invalid_argument("rates: m must be positive");
    if (d < 1) throw std::invalid_argument("rates: d must be >= 1");
}

/// The denominator offset a: the bound is C m gamma / (a + gamma)^2.
double offset(Process process, double m, const PotentialMeta& meta, int d)
{
    const double r = barrier_for(process, meta, d);
    const double sd = std::sqrt(static_cast<double>(d));
    switch (process) {
    case Process::RHMC:
    case Process::ZZ: return std::sqrt(m) + r;
    case Process::BPS: return std::sqrt(d * m) + r * sd;
    }
    return 0.0;
}

}  // namespace

double barrier_for(Process process, const PotentialMeta& meta, int d)
{
    const ConvexityBarrier b = convexity_barrier(meta, d);
    return process == Process::ZZ ? b.r_zz : b.r;
}

double rate_lower_bound(Process process, double m, const PotentialMeta& meta, int d, double gamma, double c_universal)
{
    check_common(m, d);
    if (gamma < 0.0) throw std::invalid_argument("rate_lower_bound: gamma must be nonnegative");
    const double a = offset(process, m, meta, d);
    return c_universal * m * gamma / ((a + gamma) * (a + gamma));
}

double optimal_gamma(Process process, double m, const PotentialMeta& meta, int d)
{
    check_common(m, d);
    return offset(process, m, meta, d);
}

double cj_constant(Process process, double m, const PotentialMeta& meta, int d, double window, double c_universal)
{
    check_common(m, d);
    if (!(window > 0.0)) throw std::invalid_argument("cj_constant: T must be positive");
    const double r = barrier_for(process, meta, d);
    const double sm = std::sqrt(m);
    const double core = 1.0 + 1.0 / (sm * window) + r / sm + r * window;
    const double dim_factor = process == Process::BPS ? std::sqrt(static_cast<double>(d)) : 1.0;
    return c_universal * dim_factor * core;
}

double optimal_window(Process process, double m, const PotentialMeta& meta, int d, double gamma)
{
    check_common(m, d);
    if (!(gamma > 0.0)) throw std::invalid_argument("optimal_window: gamma must be positive");
    const double r = barrier_for(process, meta, d);
    const double m4 = std::pow(m, -0.25);
    switch (process) {
    case Process::RHMC:
    case Process::ZZ: return m4 / std::sqrt(r + gamma);
    case Process::BPS: {
        const double dd = static_cast<double>(d);
        return std::pow(dd, 0.25) * m4 / std::sqrt(std::sqrt(dd) * r + gamma);
    }
    }
    return 0.0;
}

RateReport rate_report(Process process, const PotentialMeta& meta, int d, std::optional<double> gamma,
                       double c_universal)
{
    RateReport r;
    r.process = process;
    r.d = d;
    r.m = meta.m_poincare;
    r.c_universal = c_universal;
    r.gamma_opt = optimal_gamma(process, r.m, meta, d);
    r.gamma_used = gamma.value_or(r.gamma_opt);
    if (!(r.gamma_used > 0.0)) throw std::invalid_argument("rate_report: gamma must be positive");
    r.nu_lower = rate_lower_bound(process, r.m, meta, d, r.gamma_used, c_universal);
    r.t_opt = optimal_window(process, r.m, meta, d, r.gamma_used);
    r.c_j = cj_constant(process, r.m, meta, d, r.t_opt, c_universal);
    r.r_used = barrier_for(process, meta, d);
    return r;
}

std::string format_report(const RateReport& r)
{
    std::ostringstream out;
    out << std::setprecision(6);
    auto line = [&](const char* key, auto value) { out << std::left << std::setw(14) << key << value << '\n'; };
    line("process", to_string(r.process));
    line("d", r.d);
    line("m", r.m);
    line("R", r.r_used);
    line("gamma", r.gamma_used);
    line("gamma_opt", r.gamma_opt);
    line("nu_lower", r.nu_lower);
    line("T_opt", r.t_opt);
    line("C_J", r.c_j);
    line("C", r.c_universal);
    return out.str();
}

}  // namespace pdmp

#ifndef PDMP_RATES_HPP
#define PDMP_RATES_HPP

#include <optional>
#include <string>

#include "pdmp/potential.hpp"
#include "pdmp/samplers.hpp"

namespace pdmp {

// Explicit L^2 convergence-rate lower bounds for RHMC, the zigzag and the BPS,
// up to an unknown universal constant C (c_universal, 1 by default). With
//   a = sqrt(m) + R            (RHMC)
//       sqrt(m) + R_zz         (zigzag)
//       sqrt(d m) + R sqrt(d)  (BPS)
// the bound is C m gamma / (a + gamma)^2, maximized at gamma = a.

struct RateReport {
    Process process = Process::RHMC;
    int d = 1;
    double m = 1.0;
    double nu_lower = 0.0;
    double gamma_used = 0.0;
    double gamma_opt = 0.0;
    double t_opt = 0.0;
    double c_j = 0.0;
    double r_used = 0.0;
    double c_universal = 1.0;
};

double rate_lower_bound(Process process, double m, const PotentialMeta& meta, int d, double gamma,
                        double c_universal = 1.0);

double optimal_gamma(Process process, double m, const PotentialMeta& meta, int d);

/// C_J = C (1 + 1/(sqrt(m) T) + R/sqrt(m) + R T), times sqrt(d) for the BPS.
double cj_constant(Process process, double m, const PotentialMeta& meta, int d, double window,
                   double c_universal = 1.0);

/// Time window T that optimizes the bound for a given gamma.
double optimal_window(Process process, double m, const PotentialMeta& meta, int d, double gamma);

/// The barrier term the process uses: R for RHMC/BPS, R_zz for the zigzag.
double barrier_for(Process process, const PotentialMeta& meta, int d);

/// Full report; `gamma` empty means "auto" (the optimal value).
RateReport rate_report(Process process, const PotentialMeta& meta, int d, std::optional<double> gamma,
                       double c_universal = 1.0);

std::string format_report(const RateReport& r);

}  // namespace pdmp

#endif  // PDMP_RATES_HPP

#pragma once

#include <cstddef>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fbfsplit/fbf.hpp"

namespace fbfsplit {
namespace diagnostics {

// Realized path of an almost-supermartingale recursion
//   z_{n+1} <= (1 + t_n) z_n + zeta_n - xi_n.
struct SupermartingaleTrace {
    std::vector<double> z;     // length horizon
    std::vector<double> t;     // length >= horizon - 1
    std::vector<double> zeta;  // length >= horizon - 1
    std::vector<double> xi;    // length >= horizon - 1
};

struct RobbinsSiegmundReport {
    double worst_margin = 0.0;        // min_n (1+t_n) z_n + zeta_n - xi_n - z_{n+1}
    double z_tail_oscillation = 0.0;  // max - min of z over the last 10% of the horizon
    double xi_partial_sum = 0.0;
    std::size_t steps = 0;
    bool pass = false;
};

// Pathwise per-step check of the recursion; pass iff every margin >= -1e-10.
RobbinsSiegmundReport robbins_siegmund_check(const SupermartingaleTrace& tr);

struct QuasiFejerReport {
    double worst_margin = 0.0;  // min_n (1+eta_n) d_n + eps_n - d_{n+1}
    std::size_t violations = 0;
    double violation_rate = 0.0;
    std::size_t steps = 0;
    bool zero_noise = true;
    bool pass = false;  // meaningful for zero-noise traces (tol 1e-10)
};

// Checks the quasi-Fejer inequality d_{n+1} <= (1+eta_n) d_n + eps_n along a
// realized trace, with d_n the distance of x_n to the target in the current
// inverse-metric norm (plain norm without a metric sequence).  For noisy runs
// pathwise violations are admissible and only the frequency is reported.
QuasiFejerReport quasi_fejer_check(const IterateTrace& trace, const Vector& target,
                                   const std::vector<double>& eta,
                                   const std::vector<double>& eps_bound);

// Convenience: builds eta from the config's metric sequence (zero without
// one) and eps from the noise schedules' analytic moments via the explicit
// error-propagation bound
//   eps_n = sqrt(mu/alpha) (2 (m_b + m_a/(beta mu)) + m_c/(beta mu) + m_a/(beta mu)).
QuasiFejerReport quasi_fejer_check(const IterateTrace& trace, const Vector& target,
                                   const FBFConfig& config, double beta);

std::vector<double> error_bound_sequence(const FBFConfig& config, double beta, std::size_t steps);

struct SummabilityReport {
    double sum_primal_sq = 0.0;
    double sum_yq_sq = 0.0;
    double last_decade_ratio_primal = 0.0;  // tail increment / total, last 10%
    double last_decade_ratio_yq = 0.0;
    bool pass = false;  // both ratios < 1e-6
};

SummabilityReport summability_report(const IterateTrace& trace);

// Instantiates the supermartingale recursion certified by the iteration for a
// zero-noise run: z_n = d(x_n, target)^2, t = zeta = 0,
// xi_n = (1 - gamma_n^2 beta^2 mu^2)/mu * ||x_n - p_n||^2.
RobbinsSiegmundReport fbf_supermartingale_check(const IterateTrace& trace, const Vector& target,
                                                double beta, double mu = 1.0);

nlohmann::json to_json(const RobbinsSiegmundReport& r);
nlohmann::json to_json(const QuasiFejerReport& r);
nlohmann::json to_json(const SummabilityReport& r);

}  // namespace diagnostics
}  // namespace fbfsplit

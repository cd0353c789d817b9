#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fbfsplit/operators.hpp"
#include "fbfsplit/space.hpp"
#include "fbfsplit/stochastic.hpp"

namespace fbfsplit {

// Valid step-size interval [epsilon, (1-epsilon)/(beta*mu)]; requires
// 0 < epsilon < 1/(beta*mu + 1).
std::pair<double, double> step_size_interval(double beta, double mu, double epsilon);

struct FBFConfig {
    double epsilon = 0.1;
    // Constant step size; defaults to the interval midpoint when unset and no
    // per-iteration schedule is given.
    std::optional<double> gamma;
    // Per-iteration step sizes; every emitted value must lie in the interval.
    std::function<double(std::size_t)> gamma_sequence;
    std::size_t max_iters = 1000;
    double stop_tol = 0.0;  // on the primal residual ||x_n - p_n||
    NoiseTriple noise = NoiseTriple::zero(0);
    std::optional<MetricSequence> metric_seq;  // absent => U_n = Id, mu = 1
    bool certify_forward = true;

    double mu() const { return metric_seq ? metric_seq->mu : 1.0; }
    double step_at(std::size_t n, double beta) const;
    void validate(double beta) const;
};

struct IterateRecord {
    std::size_t n = 0;
    double gamma = 0.0;
    Vector x, y, p, q;  // x = x_n and the three inner points of step n
    double res_primal = 0.0;  // ||x_n - p_n||
    double res_yq = 0.0;      // ||y_n - q_n||
    std::optional<double> dist_ref;
    std::optional<double> metric_dist;  // ||x_n - x*||_{U_n^-1}
    double moment_a = 0.0, moment_b = 0.0, moment_c = 0.0;
};

struct IterateTrace {
    std::vector<IterateRecord> records;
    Vector final_x;
    std::optional<double> final_dist;
    bool converged = false;  // stopped via stop_tol before max_iters ran out

    std::size_t iterations() const { return records.size(); }
    double final_residual() const;

    // Distance sequence d_0..d_N to a target (N = iterations()), recomputed
    // from the stored iterates.
    std::vector<double> distances_to(const Vector& target) const;

    // Fixed schema: n,gamma,res_primal,res_yq,dist_ref,metric_dist,
    // moment_a,moment_b,moment_c.
    void write_csv(std::ostream& os) const;
    void write_iterates_csv(std::ostream& os) const;
};

// One iteration of the error-prone Tseng step:
//   y = x - gamma (B x + a)
//   p = J_{gamma A}(y) + b
//   q = p - gamma (B p + c)
//   x+ = x - y + q
struct StepResult {
    Vector x_next, y, p, q;
};

StepResult fbf_step(const ResolventOp& a_op, const ForwardOp& b_op, const Vector& x,
                    double gamma, const Vector& a, const Vector& b, const Vector& c);

// Variable-metric variant: y = x - gamma U(Bx + a), p = J_{gamma U A}(y) + b,
// q = p - gamma U(Bp + c).  J_{gamma U A} is available for diagonal U when A
// carries a separable weighted resolvent, and for scalar U = lambda Id by
// absorbing lambda into the step size; other combinations are rejected.
StepResult fbf_step_metric(const ResolventOp& a_op, const ForwardOp& b_op, const Metric& u,
                           const Vector& x, double gamma, const Vector& a, const Vector& b,
                           const Vector& c);

// Runs the iteration from x0 until the primal residual drops to stop_tol or
// max_iters is reached.  The optional reference point populates dist_ref (and
// metric_dist when a metric sequence is present).
IterateTrace run(const ResolventOp& a_op, const ForwardOp& b_op, double beta,
                 const FBFConfig& config, const Vector& x0,
                 const std::optional<Vector>& reference = std::nullopt);

}  // namespace fbfsplit

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fbfsplit/space.hpp"

namespace fbfsplit {

// Maximally monotone operator A exposed through its resolvent
// J_{gamma A} = (Id + gamma A)^-1.  dim < 0 means any dimension.
struct ResolventOp {
    std::string name;
    Eigen::Index dim = -1;
    std::function<Vector(double, const Vector&)> evaluate;

    // Coordinate-wise resolvent with per-coordinate step gamma * w_i, present
    // for separable subdifferential operators; required by diagonal-metric
    // steps.
    std::function<Vector(double, const Vector&, const Vector&)> evaluate_weighted;

    // Test support: membership of (p, u) in the graph of A, for operators
    // with a known closed-form graph.
    std::function<bool(const Vector&, const Vector&, double)> graph_contains;
};

// Single-valued monotone operator with known Lipschitz constant beta.
struct ForwardOp {
    std::string name;
    Eigen::Index dim = -1;
    double beta = 1.0;
    std::function<Vector(const Vector&)> evaluate;
};

// Proper l.s.c. convex function exposed through prox_{gamma f}.
struct ConvexFn {
    std::string name;
    std::function<Vector(double, const Vector&)> prox;
    std::function<Vector(double, const Vector&, const Vector&)> prox_weighted;
    std::function<double(const Vector&)> value;           // optional
    std::function<Vector(double, const Vector&)> conjugate_prox;  // optional

    ResolventOp subdifferential(Eigen::Index dim = -1) const;
};

Vector resolvent(const ResolventOp& a, double gamma, const Vector& x);

// J_{gamma A^-1}(x) = x - gamma J_{A/gamma}(x / gamma).
Vector inverse_resolvent(const ResolventOp& a, double gamma, const Vector& x);

Vector forward(const ForwardOp& b, const Vector& x);

struct CertifyReport {
    double worst_monotone_margin = 0.0;  // min <x-y, Bx-By> over sampled pairs
    double worst_lipschitz_ratio = 0.0;  // max ||Bx-By|| / ||x-y||
    std::size_t samples = 0;
    bool pass = false;
};

// Empirical certification of monotonicity and the declared Lipschitz constant
// on sampled pairs.  Can falsify, never prove.
CertifyReport certify_monotone_lipschitz(const ForwardOp& b, std::size_t samples,
                                         std::uint64_t rng_seed);

// Elementwise soft threshold, the resolvent of gamma * d|.|_1.
Vector soft_threshold(const Vector& x, double tau);

struct OperatorBundle {
    std::optional<ResolventOp> resolvent;
    std::optional<ForwardOp> forward;
    std::optional<ConvexFn> convex;
};

// Registry of named operators for CLI problem configs.  Parameters (center,
// bounds, scale, matrix, ...) ride in a JSON object; unknown names throw
// UnknownOperatorError.
OperatorBundle make_operator(const std::string& name, Eigen::Index dim,
                             const nlohmann::json& params);
OperatorBundle make_operator(const std::string& name, Eigen::Index dim);

std::vector<std::string> operator_names();

}  // namespace fbfsplit

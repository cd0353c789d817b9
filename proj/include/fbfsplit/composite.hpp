#pragma once

#include <vector>

#include "fbfsplit/fbf.hpp"
#include "fbfsplit/operators.hpp"

namespace fbfsplit {

// One coupling block: r_i in G_i, maximally monotone B_i (accessed only
// through resolvents of its inverse), monotone nu_i-Lipschitz D_i^{-1}, and
// the linear coupling L_i : H -> G_i with its precomputed operator norm.
struct CompositeBlock {
    Vector r;
    ResolventOp b;
    ForwardOp dinv;
    Matrix l;
    double l_norm = 0.0;
};

// Data of the primal-dual inclusion problem
//   z in A x + sum_i L_i^* (B_i [] D_i)(L_i x - r_i) + C x.
struct CompositeProblem {
    Vector z;
    ResolventOp a;
    ForwardOp c;  // nu_0 = c.beta
    std::vector<CompositeBlock> blocks;

    Eigen::Index primal_dim() const { return z.size(); }
    std::vector<Eigen::Index> dual_dims() const;
    Eigen::Index total_dim() const;

    // Checks dimensions, the stored ||L_i|| against the largest singular
    // value, and certifies C and every D_i^{-1} by sampling.
    void validate() const;
};

// beta = max{nu_0, ..., nu_m} + sqrt(sum_i ||L_i||^2).
double beta_bound(const CompositeProblem& p);

// Product-space lift: maximally monotone part with the split resolvent
//   J_{gamma A}(x, v) = (J_{gamma A}(x + gamma z), (J_{gamma B_i^-1}(v_i - gamma r_i))_i)
// and the Lipschitz part
//   B(x, v) = (Cx + sum_i L_i^* v_i, D_1^-1 v_1 - L_1 x, ..., D_m^-1 v_m - L_m x).
struct LiftedOperators {
    ResolventOp a;
    ForwardOp b;  // beta = beta_bound
};

LiftedOperators lift(const CompositeProblem& p);

struct SolveResult {
    IterateTrace trace;  // over the packed product space K
    Vector x_bar;
    std::vector<Vector> v_bar;
};

// Block-coordinate primal-dual iteration; by the lift identity it produces
// the same trajectory as run() on lift(p), bit for bit, for identical seeds.
SolveResult solve_primal_dual(const CompositeProblem& p, const FBFConfig& config,
                              const Vector& x0, const std::vector<Vector>& v0,
                              const std::optional<Vector>& reference = std::nullopt);

// One block of the convex specialization: r_k, g_k (dualized through the
// Moreau identity), grad of the strongly-convex conjugate ell_k^*, and L_k.
struct ConvexBlock {
    Vector r;
    ConvexFn g;
    ForwardOp lstar_grad;
    Matrix l;
    double l_norm = 0.0;
};

// minimize f(x) - <x,z> + sum_k (ell_k [] g_k)(L_k x - r_k) + h(x)
struct ConvexProblem {
    Vector z;
    ConvexFn f;
    ForwardOp h_grad;  // nu_0-Lipschitz gradient of h
    std::vector<ConvexBlock> blocks;

    CompositeProblem to_composite() const;
};

SolveResult solve_convex(const ConvexProblem& p, const FBFConfig& config, const Vector& x0,
                         const std::vector<Vector>& v0,
                         const std::optional<Vector>& reference = std::nullopt);

struct VIResult {
    IterateTrace trace;
    Vector x_bar;
};

// Variational inequality: find x with <x - y, Bx> + f(x) <= f(y) for all y;
// runs the Tseng iteration with A = df realized through the prox of f.
VIResult solve_variational_inequality(const ConvexFn& f, const ForwardOp& b,
                                      const FBFConfig& config, const Vector& x0,
                                      const std::optional<Vector>& reference = std::nullopt);

}  // namespace fbfsplit

#include "fbfsplit/composite.hpp"

#include <cmath>

namespace fbfsplit {

std::vector<Eigen::Index> CompositeProblem::dual_dims() const {
    std::vector<Eigen::Index> dims;
    dims.reserve(blocks.size());
    for (const auto& blk : blocks) dims.push_back(blk.r.size());
    return dims;
}

Eigen::Index CompositeProblem::total_dim() const {
    Eigen::Index total = primal_dim();
    for (const auto& blk : blocks) total += blk.r.size();
    return total;
}

void CompositeProblem::validate() const {
    if (blocks.empty()) throw Error("composite problem needs at least one block");
    const Eigen::Index nh = primal_dim();
    if (c.dim >= 0 && c.dim != nh) throw DimensionError("composite C", nh, c.dim);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& blk = blocks[i];
        const Eigen::Index ng = blk.r.size();
        if (blk.l.rows() != ng || blk.l.cols() != nh) {
            throw DimensionError("composite block L_" + std::to_string(i + 1), ng * nh,
                                 blk.l.rows() * blk.l.cols());
        }
        const double svmax = blk.l.jacobiSvd().singularValues().maxCoeff();
        if (std::abs(svmax - blk.l_norm) > 1e-10 * std::max(1.0, svmax)) {
            throw Error("composite block " + std::to_string(i + 1) + ": stored ||L|| = " +
                        std::to_string(blk.l_norm) + " does not match the largest singular value " +
                        std::to_string(svmax));
        }
        const auto cert = certify_monotone_lipschitz(blk.dinv, 64, 0xD1A6ull + i);
        if (!cert.pass) {
            throw CertificationError("composite block " + std::to_string(i + 1) +
                                     ": D^-1 failed monotone/Lipschitz certification");
        }
    }
    const auto cert = certify_monotone_lipschitz(c, 64, 0xD1A6ull);
    if (!cert.pass) throw CertificationError("composite C failed monotone/Lipschitz certification");
}

double beta_bound(const CompositeProblem& p) {
    double numax = p.c.beta;
    double lsq = 0.0;
    for (const auto& blk : p.blocks) {
        numax = std::max(numax, blk.dinv.beta);
        lsq += blk.l_norm * blk.l_norm;
    }
    return numax + std::sqrt(lsq);
}

LiftedOperators lift(const CompositeProblem& p) {
    const Eigen::Index nh = p.primal_dim();
    const auto dims = p.dual_dims();
    const Eigen::Index total = p.total_dim();

    LiftedOperators ops;
    ops.a.name = "lift(" + p.a.name + ")";
    ops.a.dim = total;
    ops.a.evaluate = [p, nh, dims](double gamma, const Vector& u) {
        Vector x;
        std::vector<Vector> v;
        split(u, nh, dims, x, v);
        Vector primal = p.a.evaluate(gamma, x + gamma * p.z);
        std::vector<Vector> duals(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            duals[i] = inverse_resolvent(p.blocks[i].b, gamma, v[i] - gamma * p.blocks[i].r);
        }
        return flatten(primal, duals);
    };

    ops.b.name = "lift(B)";
    ops.b.dim = total;
    ops.b.beta = beta_bound(p);
    ops.b.evaluate = [p, nh, dims](const Vector& u) {
        Vector x;
        std::vector<Vector> v;
        split(u, nh, dims, x, v);
        Vector primal = p.c.evaluate(x);
        for (std::size_t i = 0; i < v.size(); ++i) {
            primal += p.blocks[i].l.transpose() * v[i];
        }
        std::vector<Vector> duals(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            duals[i] = p.blocks[i].dinv.evaluate(v[i]) - p.blocks[i].l * x;
        }
        return flatten(primal, duals);
    };
    return ops;
}

SolveResult solve_primal_dual(const CompositeProblem& prob, const FBFConfig& config,
                              const Vector& x0, const std::vector<Vector>& v0,
                              const std::optional<Vector>& reference) {
    prob.validate();
    if (config.metric_seq) {
        throw UnsupportedCombinationError("solve_primal_dual does not support metric sequences");
    }
    const double beta = beta_bound(prob);
    config.validate(beta);
    const auto [lo, hi] = step_size_interval(beta, 1.0, config.epsilon);

    const Eigen::Index nh = prob.primal_dim();
    const auto dims = prob.dual_dims();
    const Eigen::Index total = prob.total_dim();
    const std::size_t m = prob.blocks.size();
    if (x0.size() != nh) throw DimensionError("solve_primal_dual x0", nh, x0.size());
    if (v0.size() != m) {
        throw DimensionError("solve_primal_dual v0 blocks", static_cast<Eigen::Index>(m),
                             static_cast<Eigen::Index>(v0.size()));
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (v0[i].size() != dims[i]) {
            throw DimensionError("solve_primal_dual v0", dims[i], v0[i].size());
        }
    }
    const NoiseTriple& noise = config.noise;
    if (noise.a.dim != total || noise.b.dim != total || noise.c.dim != total) {
        throw DimensionError("solve_primal_dual noise dimension", total, noise.a.dim);
    }

    Vector x = x0;
    std::vector<Vector> v = v0;
    const double guard = 1e6 * (1.0 + flatten(x, v).norm());

    IterateTrace trace;
    for (std::size_t n = 0; n < config.max_iters; ++n) {
        const Vector xk = flatten(x, v);
        const double xnorm = xk.norm();
        if (xnorm > guard) throw DivergenceError(n, xnorm, guard);
        const double gamma = config.step_at(n, beta);
        if (gamma < lo - 1e-15 || gamma > hi + 1e-15) {
            throw StepSizeError("gamma_n outside the valid interval at n = " + std::to_string(n));
        }
        const Vector ea = noise.a.sample(n);
        const Vector eb = noise.b.sample(n);
        const Vector ec = noise.c.sample(n);

        // Forward pass at (x, v) with the a-noise.
        Vector t1 = prob.c.evaluate(x);
        for (std::size_t i = 0; i < m; ++i) t1 += prob.blocks[i].l.transpose() * v[i];
        t1 += ea.head(nh);
        const Vector y1 = x - gamma * t1;

        std::vector<Vector> y2(m);
        {
            Eigen::Index off = nh;
            for (std::size_t i = 0; i < m; ++i) {
                Vector w = prob.blocks[i].dinv.evaluate(v[i]) - prob.blocks[i].l * x;
                w += ea.segment(off, dims[i]);
                y2[i] = v[i] - gamma * w;
                off += dims[i];
            }
        }

        // Shifted resolvents with the b-noise.
        Vector p1 = prob.a.evaluate(gamma, y1 + gamma * prob.z);
        p1 += eb.head(nh);
        std::vector<Vector> p2(m);
        {
            Eigen::Index off = nh;
            for (std::size_t i = 0; i < m; ++i) {
                p2[i] = inverse_resolvent(prob.blocks[i].b, gamma,
                                          y2[i] - gamma * prob.blocks[i].r);
                p2[i] += eb.segment(off, dims[i]);
                off += dims[i];
            }
        }

        // Correction pass at (p1, p2) with the c-noise.
        std::vector<Vector> q2(m);
        {
            Eigen::Index off = nh;
            for (std::size_t i = 0; i < m; ++i) {
                Vector s = prob.blocks[i].dinv.evaluate(p2[i]) - prob.blocks[i].l * p1;
                s += ec.segment(off, dims[i]);
                q2[i] = p2[i] - gamma * s;
                off += dims[i];
            }
        }
        Vector u1 = prob.c.evaluate(p1);
        for (std::size_t i = 0; i < m; ++i) u1 += prob.blocks[i].l.transpose() * p2[i];
        u1 += ec.head(nh);
        const Vector q1 = p1 - gamma * u1;

        IterateRecord rec;
        rec.n = n;
        rec.gamma = gamma;
        rec.x = xk;
        rec.y = flatten(y1, y2);
        rec.p = flatten(p1, p2);
        rec.q = flatten(q1, q2);
        rec.res_primal = (rec.x - rec.p).norm();
        rec.res_yq = (rec.y - rec.q).norm();
        if (reference) rec.dist_ref = (rec.x - *reference).norm();
        rec.moment_a = noise.a.conditional_moment(n);
        rec.moment_b = noise.b.conditional_moment(n);
        rec.moment_c = noise.c.conditional_moment(n);
        if (!rec.q.allFinite()) throw NonFiniteError("composite step");
        trace.records.push_back(std::move(rec));

        x = (x - y1) + q1;
        for (std::size_t i = 0; i < m; ++i) v[i] = (v[i] - y2[i]) + q2[i];

        if (trace.records.back().res_primal <= config.stop_tol) {
            trace.converged = true;
            break;
        }
    }
    trace.final_x = flatten(x, v);
    if (reference) trace.final_dist = (trace.final_x - *reference).norm();
    return SolveResult{std::move(trace), std::move(x), std::move(v)};
}

CompositeProblem ConvexProblem::to_composite() const {
    CompositeProblem p;
    p.z = z;
    p.a = f.subdifferential(z.size());
    p.c = h_grad;
    for (const auto& blk : blocks) {
        CompositeBlock cb;
        cb.r = blk.r;
        cb.b = blk.g.subdifferential(blk.r.size());
        cb.dinv = blk.lstar_grad;
        cb.l = blk.l;
        cb.l_norm = blk.l_norm;
        p.blocks.push_back(std::move(cb));
    }
    return p;
}

SolveResult solve_convex(const ConvexProblem& p, const FBFConfig& config, const Vector& x0,
                         const std::vector<Vector>& v0, const std::optional<Vector>& reference) {
    return solve_primal_dual(p.to_composite(), config, x0, v0, reference);
}

VIResult solve_variational_inequality(const ConvexFn& f, const ForwardOp& b,
                                      const FBFConfig& config, const Vector& x0,
                                      const std::optional<Vector>& reference) {
    IterateTrace trace = run(f.subdifferential(x0.size()), b, b.beta, config, x0, reference);
    Vector x_bar = trace.final_x;
    return VIResult{std::move(trace), std::move(x_bar)};
}

}  // namespace fbfsplit

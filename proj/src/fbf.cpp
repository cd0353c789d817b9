#include "fbfsplit/fbf.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace fbfsplit {

namespace {

void check_finite(const Vector& v, const char* substep) {
    if (!v.allFinite()) throw NonFiniteError(substep);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace

std::pair<double, double> step_size_interval(double beta, double mu, double epsilon) {
    if (!(beta > 0.0) || !(mu > 0.0)) {
        throw StepSizeError("step_size_interval: beta and mu must be positive");
    }
    const double bound = 1.0 / (beta * mu + 1.0);
    if (!(epsilon > 0.0) || !(epsilon < bound)) {
        throw StepSizeError("epsilon = " + std::to_string(epsilon) +
                            " outside ]0, 1/(beta*mu+1)[ = ]0, " + std::to_string(bound) + "[");
    }
    return {epsilon, (1.0 - epsilon) / (beta * mu)};
}

double FBFConfig::step_at(std::size_t n, double beta) const {
    if (gamma_sequence) return gamma_sequence(n);
    if (gamma) return *gamma;
    const auto [lo, hi] = step_size_interval(beta, mu(), epsilon);
    return 0.5 * (lo + hi);
}

void FBFConfig::validate(double beta) const {
    const auto [lo, hi] = step_size_interval(beta, mu(), epsilon);
    if (gamma && (*gamma < lo || *gamma > hi)) {
        throw StepSizeError("gamma = " + std::to_string(*gamma) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    if (max_iters < 1) throw Error("max_iters must be >= 1");
    if (stop_tol < 0.0) throw Error("stop_tol must be nonnegative");
}

StepResult fbf_step(const ResolventOp& a_op, const ForwardOp& b_op, const Vector& x,
                    double gamma, const Vector& a, const Vector& b, const Vector& c) {
    StepResult r;
    Vector t = b_op.evaluate(x);
    t += a;
    r.y = x - gamma * t;
    check_finite(r.y, "y = x - gamma(Bx + a)");
    r.p = a_op.evaluate(gamma, r.y);
    r.p += b;
    check_finite(r.p, "p = J(y) + b");
    Vector u = b_op.evaluate(r.p);
    u += c;
    r.q = r.p - gamma * u;
    check_finite(r.q, "q = p - gamma(Bp + c)");
    r.x_next = (x - r.y) + r.q;
    return r;
}

StepResult fbf_step_metric(const ResolventOp& a_op, const ForwardOp& b_op, const Metric& u_n,
                           const Vector& x, double gamma, const Vector& a, const Vector& b,
                           const Vector& c) {
    if (u_n.dim() != x.size()) throw DimensionError("fbf_step_metric", u_n.dim(), x.size());

    if (a_op.evaluate_weighted && u_n.is_diagonal()) {
        const Vector w = u_n.matrix().diagonal();
        StepResult r;
        Vector t = b_op.evaluate(x);
        t += a;
        r.y = x - gamma * w.cwiseProduct(t);
        check_finite(r.y, "y = x - gamma U(Bx + a)");
        r.p = a_op.evaluate_weighted(gamma, w, r.y);
        r.p += b;
        check_finite(r.p, "p = J_{gamma U A}(y) + b");
        Vector s = b_op.evaluate(r.p);
        s += c;
        r.q = r.p - gamma * w.cwiseProduct(s);
        check_finite(r.q, "q = p - gamma U(Bp + c)");
        r.x_next = (x - r.y) + r.q;
        return r;
    }

    double lambda;
    if (u_n.is_scalar(lambda)) {
        return fbf_step(a_op, b_op, x, gamma * lambda, a, b, c);
    }
    throw UnsupportedCombinationError(
        "fbf_step_metric: metric must be scalar, or diagonal with a separable resolvent for A "
        "(operator '" + a_op.name + "')");
}

double IterateTrace::final_residual() const {
    return records.empty() ? 0.0 : records.back().res_primal;
}

std::vector<double> IterateTrace::distances_to(const Vector& target) const {
    std::vector<double> d;
    d.reserve(records.size() + 1);
    for (const auto& rec : records) d.push_back((rec.x - target).norm());
    d.push_back((final_x - target).norm());
    return d;
}

void IterateTrace::write_csv(std::ostream& os) const {
    os << "n,gamma,res_primal,res_yq,dist_ref,metric_dist,moment_a,moment_b,moment_c\n";
    for (const auto& r : records) {
        os << r.n << ',' << format_double(r.gamma) << ',' << format_double(r.res_primal) << ','
           << format_double(r.res_yq) << ',' << format_optional(r.dist_ref) << ','
           << format_optional(r.metric_dist) << ',' << format_double(r.moment_a) << ','
           << format_double(r.moment_b) << ',' << format_double(r.moment_c) << '\n';
    }
}

void IterateTrace::write_iterates_csv(std::ostream& os) const {
    if (records.empty()) return;
    const Eigen::Index dim = records.front().x.size();
    os << 'n';
    for (const char* tag : {"x", "y", "p", "q"}) {
        for (Eigen::Index i = 0; i < dim; ++i) os << ',' << tag << i;
    }
    os << '\n';
    for (const auto& r : records) {
        os << r.n;
        for (const Vector* v : {&r.x, &r.y, &r.p, &r.q}) {
            for (Eigen::Index i = 0; i < dim; ++i) os << ',' << format_double((*v)[i]);
        }
        os << '\n';
    }
}

IterateTrace run(const ResolventOp& a_op, const ForwardOp& b_op, double beta,
                 const FBFConfig& config, const Vector& x0,
                 const std::optional<Vector>& reference) {
    if (!(beta > 0.0)) throw Error("run: beta must be positive");
    if (!is_finite(x0)) throw NonFiniteError("x0");
    config.validate(beta);
    const auto [lo, hi] = step_size_interval(beta, config.mu(), config.epsilon);
    if (config.certify_forward) {
        const auto cert = certify_monotone_lipschitz(b_op, 64, 0xC0FFEEull);
        if (!cert.pass) {
            throw CertificationError(
                "forward operator '" + b_op.name + "' failed certification: monotone margin " +
                std::to_string(cert.worst_monotone_margin) + ", Lipschitz ratio " +
                std::to_string(cert.worst_lipschitz_ratio) + " vs declared beta " +
                std::to_string(b_op.beta));
        }
    }
    const NoiseTriple& noise = config.noise;
    if (noise.a.dim != x0.size() || noise.b.dim != x0.size() || noise.c.dim != x0.size()) {
        throw DimensionError("run: noise schedule dimension", x0.size(), noise.a.dim);
    }

    const double guard = 1e6 * (1.0 + x0.norm());
    IterateTrace trace;
    trace.records.reserve(std::min<std::size_t>(config.max_iters, 1 << 20));
    Vector x = x0;
    for (std::size_t n = 0; n < config.max_iters; ++n) {
        const double xnorm = x.norm();
        if (xnorm > guard) throw DivergenceError(n, xnorm, guard);
        const double gamma = config.step_at(n, beta);
        if (gamma < lo - 1e-15 || gamma > hi + 1e-15) {
            throw StepSizeError("gamma_n = " + std::to_string(gamma) + " at n = " +
                                std::to_string(n) + " outside [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
        }
        const Vector ea = noise.a.sample(n);
        const Vector eb = noise.b.sample(n);
        const Vector ec = noise.c.sample(n);

        StepResult step = config.metric_seq
                              ? fbf_step_metric(a_op, b_op, config.metric_seq->at(n), x, gamma,
                                                ea, eb, ec)
                              : fbf_step(a_op, b_op, x, gamma, ea, eb, ec);

        IterateRecord rec;
        rec.n = n;
        rec.gamma = gamma;
        rec.x = x;
        rec.y = step.y;
        rec.p = step.p;
        rec.q = step.q;
        rec.res_primal = (x - step.p).norm();
        rec.res_yq = (step.y - step.q).norm();
        if (reference) {
            rec.dist_ref = (x - *reference).norm();
            if (config.metric_seq) {
                rec.metric_dist = inverse_metric_norm(config.metric_seq->at(n), x - *reference);
            }
        }
        rec.moment_a = noise.a.conditional_moment(n);
        rec.moment_b = noise.b.conditional_moment(n);
        rec.moment_c = noise.c.conditional_moment(n);
        trace.records.push_back(std::move(rec));

        x = step.x_next;
        if (trace.records.back().res_primal <= config.stop_tol) {
            trace.converged = true;
            break;
        }
    }
    trace.final_x = x;
    if (reference) trace.final_dist = (x - *reference).norm();
    return trace;
}

}  // namespace fbfsplit

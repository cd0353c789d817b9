#include "fbfsplit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "fbfsplit/rng.hpp"

namespace fbfsplit {

using nlohmann::json;

namespace {

void check_dim(const char* where, Eigen::Index expected, Eigen::Index got) {
    if (expected >= 0 && expected != got) throw DimensionError(where, expected, got);
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

Vector param_vector(const json& params, const std::string& key, Eigen::Index dim,
                    double fallback) {
    if (params.contains(key)) {
        const auto& p = params.at(key);
        if (p.is_number()) return Vector::Constant(dim, p.get<double>());
        Vector v(dim);
        if (static_cast<Eigen::Index>(p.size()) != dim) {
            throw DimensionError(("operator param '" + key + "'").c_str(), dim,
                                 static_cast<Eigen::Index>(p.size()));
        }
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = p.at(i).get<double>();
        return v;
    }
    return Vector::Constant(dim, fallback);
}

}  // namespace

ResolventOp ConvexFn::subdifferential(Eigen::Index dim) const {
    ResolventOp op;
    op.name = "d(" + name + ")";
    op.dim = dim;
    op.evaluate = prox;
    op.evaluate_weighted = prox_weighted;
    return op;
}

Vector resolvent(const ResolventOp& a, double gamma, const Vector& x) {
    if (!(gamma > 0.0)) throw StepSizeError("resolvent: gamma must be positive");
    check_dim("resolvent", a.dim, x.size());
    return a.evaluate(gamma, x);
}

Vector inverse_resolvent(const ResolventOp& a, double gamma, const Vector& x) {
    if (!(gamma > 0.0)) throw StepSizeError("inverse_resolvent: gamma must be positive");
    check_dim("inverse_resolvent", a.dim, x.size());
    return x - gamma * a.evaluate(1.0 / gamma, x / gamma);
}

Vector forward(const ForwardOp& b, const Vector& x) {
    check_dim("forward", b.dim, x.size());
    return b.evaluate(x);
}

CertifyReport certify_monotone_lipschitz(const ForwardOp& b, std::size_t samples,
                                         std::uint64_t rng_seed) {
    if (samples < 2) throw Error("certify_monotone_lipschitz: samples must be >= 2");
    if (b.dim < 1) throw Error("certify_monotone_lipschitz: operator dimension unknown");
    SampleStream rng(rng_seed);
    CertifyReport report;
    report.samples = samples;
    report.worst_monotone_margin = std::numeric_limits<double>::infinity();
    report.worst_lipschitz_ratio = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        Vector x(b.dim), y(b.dim);
        const double scale = std::exp(rng.uniform(-1.0, 3.0));
        for (Eigen::Index i = 0; i < b.dim; ++i) x[i] = scale * rng.normal();
        for (Eigen::Index i = 0; i < b.dim; ++i) y[i] = scale * rng.normal();
        const Vector dxy = x - y;
        const double dist = dxy.norm();
        if (dist == 0.0) continue;
        const Vector dB = b.evaluate(x) - b.evaluate(y);
        report.worst_monotone_margin =
            std::min(report.worst_monotone_margin, dxy.dot(dB) / (dist * dist));
        report.worst_lipschitz_ratio = std::max(report.worst_lipschitz_ratio, dB.norm() / dist);
    }
    report.pass = report.worst_monotone_margin >= -1e-10 &&
                  report.worst_lipschitz_ratio <= b.beta * (1.0 + 1e-8);
    return report;
}

Vector soft_threshold(const Vector& x, double tau) {
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        out[i] = sign(x[i]) * std::max(0.0, std::abs(x[i]) - tau);
    }
    return out;
}

namespace {

OperatorBundle make_zero(Eigen::Index dim, const json& params) {
    OperatorBundle b;
    ConvexFn f;
    f.name = "zero";
    f.prox = [](double, const Vector& x) { return x; };
    f.prox_weighted = [](double, const Vector&, const Vector& x) { return x; };
    f.value = [](const Vector&) { return 0.0; };
    f.conjugate_prox = [](double, const Vector& x) { return Vector(Vector::Zero(x.size())); };
    b.convex = f;
    b.resolvent = f.subdifferential(dim);
    b.resolvent->name = "zero";
    b.resolvent->graph_contains = [](const Vector&, const Vector& u, double tol) {
        return u.cwiseAbs().maxCoeff() <= tol;
    };
    ForwardOp fw;
    fw.name = "zero";
    fw.dim = dim;
    fw.beta = params.value("beta", 1.0);
    fw.evaluate = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
    b.forward = fw;
    return b;
}

OperatorBundle make_scaled_identity(Eigen::Index dim, double lambda) {
    if (lambda < 0.0) throw Error("scaled_identity: scale must be nonnegative for monotonicity");
    OperatorBundle b;
    ConvexFn f;
    f.name = "scaled_identity";
    f.prox = [lambda](double g, const Vector& x) { return Vector(x / (1.0 + g * lambda)); };
    f.prox_weighted = [lambda](double g, const Vector& w, const Vector& x) {
        Vector out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = x[i] / (1.0 + g * w[i] * lambda);
        return out;
    };
    f.value = [lambda](const Vector& x) { return 0.5 * lambda * x.squaredNorm(); };
    if (lambda > 0.0) {
        f.conjugate_prox = [lambda](double g, const Vector& x) {
            return Vector(x / (1.0 + g / lambda));
        };
    }
    b.convex = f;
    b.resolvent = f.subdifferential(dim);
    b.resolvent->name = "scaled_identity";
    b.resolvent->graph_contains = [lambda](const Vector& p, const Vector& u, double tol) {
        return (u - lambda * p).cwiseAbs().maxCoeff() <= tol;
    };
    ForwardOp fw;
    fw.name = "scaled_identity";
    fw.dim = dim;
    fw.beta = lambda > 0.0 ? lambda : 1.0;
    fw.evaluate = [lambda](const Vector& x) { return Vector(lambda * x); };
    b.forward = fw;
    return b;
}

OperatorBundle make_affine(Eigen::Index dim, const json& params) {
    if (!params.contains("matrix")) throw Error("affine operator requires a 'matrix' param");
    const auto& m = params.at("matrix");
    if (static_cast<Eigen::Index>(m.size()) != dim * dim) {
        throw DimensionError("affine 'matrix' param (row-major, dim*dim)", dim * dim,
                             static_cast<Eigen::Index>(m.size()));
    }
    Matrix M(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) M(i, j) = m.at(i * dim + j).get<double>();
    const Vector offset = param_vector(params, "offset", dim, 0.0);

    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw Error("affine operator matrix is not monotone (M + M^T has a negative eigenvalue)");
    }
    const double beta = M.jacobiSvd().singularValues().maxCoeff();

    OperatorBundle b;
    ForwardOp fw;
    fw.name = "affine";
    fw.dim = dim;
    fw.beta = beta > 0.0 ? beta : 1.0;
    fw.evaluate = [M, offset](const Vector& x) { return Vector(M * x + offset); };
    b.forward = fw;

    ResolventOp r;
    r.name = "affine";
    r.dim = dim;
    r.evaluate = [M, offset, dim](double g, const Vector& x) {
        const Matrix lhs = Matrix::Identity(dim, dim) + g * M;
        return Vector(lhs.partialPivLu().solve(x - g * offset));
    };
    r.graph_contains = [M, offset](const Vector& p, const Vector& u, double tol) {
        return (u - (M * p + offset)).cwiseAbs().maxCoeff() <= tol;
    };
    b.resolvent = r;
    return b;
}

OperatorBundle make_skew_rotation(Eigen::Index dim) {
    if (dim < 2 || dim % 2 != 0) {
        throw Error("skew_rotation requires even dimension >= 2");
    }
    OperatorBundle b;
    ForwardOp fw;
    fw.name = "skew_rotation";
    fw.dim = dim;
    fw.beta = 1.0;
    fw.evaluate = [](const Vector& x) {
        Vector out(x.size());
        for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
            out[i] = x[i + 1];
            out[i + 1] = -x[i];
        }
        return out;
    };
    b.forward = fw;
    return b;
}

OperatorBundle make_l1(Eigen::Index dim) {
    OperatorBundle b;
    ConvexFn f;
    f.name = "l1";
    f.prox = [](double g, const Vector& x) { return soft_threshold(x, g); };
    f.prox_weighted = [](double g, const Vector& w, const Vector& x) {
        Vector out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            out[i] = sign(x[i]) * std::max(0.0, std::abs(x[i]) - g * w[i]);
        }
        return out;
    };
    f.value = [](const Vector& x) { return x.cwiseAbs().sum(); };
    // Conjugate is the indicator of the unit box; its prox is the projection.
    f.conjugate_prox = [](double, const Vector& x) {
        return Vector(x.cwiseMax(-1.0).cwiseMin(1.0));
    };
    b.convex = f;
    b.resolvent = f.subdifferential(dim);
    b.resolvent->name = "l1";
    b.resolvent->graph_contains = [](const Vector& p, const Vector& u, double tol) {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (p[i] == 0.0 ? std::abs(u[i]) > 1.0 + tol : std::abs(u[i] - sign(p[i])) > tol) {
                return false;
            }
        }
        return true;
    };
    return b;
}

OperatorBundle make_box_projection(Eigen::Index dim, const json& params) {
    const Vector lo = param_vector(params, "lower", dim, -1.0);
    const Vector hi = param_vector(params, "upper", dim, 1.0);
    if ((hi - lo).minCoeff() < 0.0) throw Error("box_projection: lower must not exceed upper");
    auto clamp = [lo, hi](const Vector& x) {
        return Vector(x.cwiseMax(lo).cwiseMin(hi));
    };
    OperatorBundle b;
    ConvexFn f;
    f.name = "box_projection";
    f.prox = [clamp](double, const Vector& x) { return clamp(x); };
    f.prox_weighted = [clamp](double, const Vector&, const Vector& x) { return clamp(x); };
    f.value = [lo, hi](const Vector& x) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] < lo[i] - 1e-12 || x[i] > hi[i] + 1e-12) {
                return std::numeric_limits<double>::infinity();
            }
        }
        return 0.0;
    };
    // Conjugate is the support function of the box; shrink toward zero with
    // per-coordinate thresholds gamma*hi (above) and gamma*lo (below).
    f.conjugate_prox = [lo, hi](double g, const Vector& x) {
        Vector out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] > g * hi[i]) {
                out[i] = x[i] - g * hi[i];
            } else if (x[i] < g * lo[i]) {
                out[i] = x[i] - g * lo[i];
            } else {
                out[i] = 0.0;
            }
        }
        return out;
    };
    b.convex = f;
    b.resolvent = f.subdifferential(dim);
    b.resolvent->name = "box_projection";
    b.resolvent->graph_contains = [lo, hi](const Vector& p, const Vector& u, double tol) {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            const bool at_lo = p[i] <= lo[i] + tol;
            const bool at_hi = p[i] >= hi[i] - tol;
            if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
            if (!at_lo && !at_hi && std::abs(u[i]) > tol) return false;
            if (at_lo && !at_hi && u[i] > tol) return false;
            if (at_hi && !at_lo && u[i] < -tol) return false;
        }
        return true;
    };
    return b;
}

OperatorBundle make_quadratic(Eigen::Index dim, const json& params) {
    const Vector center = param_vector(params, "center", dim, 0.0);
    OperatorBundle b;
    ConvexFn f;
    f.name = "quadratic";
    f.prox = [center](double g, const Vector& x) {
        return Vector((x + g * center) / (1.0 + g));
    };
    f.prox_weighted = [center](double g, const Vector& w, const Vector& x) {
        Vector out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            out[i] = (x[i] + g * w[i] * center[i]) / (1.0 + g * w[i]);
        }
        return out;
    };
    f.value = [center](const Vector& x) { return 0.5 * (x - center).squaredNorm(); };
    f.conjugate_prox = [center](double g, const Vector& x) {
        return Vector((x - g * center) / (1.0 + g));
    };
    b.convex = f;
    b.resolvent = f.subdifferential(dim);
    b.resolvent->name = "quadratic";
    b.resolvent->graph_contains = [center](const Vector& p, const Vector& u, double tol) {
        return (u - (p - center)).cwiseAbs().maxCoeff() <= tol;
    };
    ForwardOp fw;
    fw.name = "quadratic";
    fw.dim = dim;
    fw.beta = 1.0;
    fw.evaluate = [center](const Vector& x) { return Vector(x - center); };
    b.forward = fw;
    return b;
}

OperatorBundle make_indicator_zero(Eigen::Index dim, const json& params) {
    OperatorBundle b;
    ConvexFn f;
    f.name = "indicator_zero";
    f.prox = [](double, const Vector& x) { return Vector(Vector::Zero(x.size())); };
    f.prox_weighted = [](double, const Vector&, const Vector& x) {
        return Vector(Vector::Zero(x.size()));
    };
    f.value = [](const Vector& x) {
        return x.cwiseAbs().maxCoeff() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    // Conjugate is identically zero, so its prox is the identity and its
    // gradient vanishes: the degenerate "no parallel sum" case.
    f.conjugate_prox = [](double, const Vector& x) { return x; };
    b.convex = f;
    b.resolvent = f.subdifferential(dim);
    b.resolvent->name = "indicator_zero";
    b.resolvent->graph_contains = [](const Vector& p, const Vector&, double tol) {
        return p.cwiseAbs().maxCoeff() <= tol;
    };
    ForwardOp fw;
    fw.name = "indicator_zero";  // gradient of the zero conjugate
    fw.dim = dim;
    fw.beta = params.value("beta", 1.0);
    fw.evaluate = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
    b.forward = fw;
    return b;
}

OperatorBundle make_l1_quadratic(Eigen::Index dim) {
    OperatorBundle b;
    ConvexFn f;
    f.name = "l1_quadratic";
    f.prox = [](double g, const Vector& x) {
        return Vector(soft_threshold(x, g) / (1.0 + g));
    };
    f.prox_weighted = [](double g, const Vector& w, const Vector& x) {
        Vector out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double tau = g * w[i];
            out[i] = sign(x[i]) * std::max(0.0, std::abs(x[i]) - tau) / (1.0 + tau);
        }
        return out;
    };
    f.value = [](const Vector& x) { return x.cwiseAbs().sum() + 0.5 * x.squaredNorm(); };
    b.convex = f;
    b.resolvent = f.subdifferential(dim);
    b.resolvent->name = "l1_quadratic";
    b.resolvent->graph_contains = [](const Vector& p, const Vector& u, double tol) {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            const double r = u[i] - p[i];  // remainder must lie in sign(p_i)
            if (p[i] == 0.0 ? std::abs(r) > 1.0 + tol : std::abs(r - sign(p[i])) > tol) {
                return false;
            }
        }
        return true;
    };
    return b;
}

}  // namespace

OperatorBundle make_operator(const std::string& name, Eigen::Index dim, const json& params) {
    if (dim < 1) throw Error("make_operator: dimension must be >= 1");
    if (name == "zero") return make_zero(dim, params);
    if (name == "identity") return make_scaled_identity(dim, 1.0);
    if (name == "scaled_identity") return make_scaled_identity(dim, params.value("scale", 1.0));
    if (name == "affine") return make_affine(dim, params);
    if (name == "skew_rotation") return make_skew_rotation(dim);
    if (name == "l1") return make_l1(dim);
    if (name == "box_projection") return make_box_projection(dim, params);
    if (name == "quadratic") return make_quadratic(dim, params);
    if (name == "indicator_zero") return make_indicator_zero(dim, params);
    if (name == "l1_quadratic") return make_l1_quadratic(dim);
    throw UnknownOperatorError(name);
}

OperatorBundle make_operator(const std::string& name, Eigen::Index dim) {
    return make_operator(name, dim, json::object());
}

std::vector<std::string> operator_names() {
    return {"zero",           "identity", "scaled_identity", "affine",
            "skew_rotation",  "l1",       "box_projection",  "quadratic",
            "indicator_zero", "l1_quadratic"};
}

}  // namespace fbfsplit

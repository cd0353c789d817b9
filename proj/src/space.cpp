#include "fbfsplit/space.hpp"

#include <algorithm>
#include <cmath>

#include "fbfsplit/rng.hpp"

namespace fbfsplit {

namespace {
constexpr double kSymmetryTol = 1e-12;  // relative
constexpr double kSpectralTol = 1e-10;
constexpr double kRcondFloor = 1e-14;
}  // namespace

bool is_finite(const Vector& x) { return x.allFinite(); }

Metric::Metric(Matrix m, double alpha) : matrix_(std::move(m)), alpha_(alpha) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1) {
        throw InvalidMetricError("metric matrix must be square and non-empty");
    }
    if (!(alpha_ > 0.0)) {
        throw InvalidMetricError("metric lower bound alpha must be positive");
    }
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= kSymmetryTol * scale)) {
        throw InvalidMetricError("metric matrix is not symmetric to tolerance");
    }
    const Eigen::Index n = matrix_.rows();

    double min_eig;
    if (n <= 512) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
        min_eig = es.eigenvalues().minCoeff();
        op_norm_ = es.eigenvalues().cwiseAbs().maxCoeff();
    } else {
        // Randomized Rayleigh probing: power iteration on (c*Id - W) for the
        // smallest eigenvalue, plain power iteration for the largest.
        SampleStream rng(0x5eedULL);
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
        v.normalize();
        for (int it = 0; it < 100; ++it) v = (matrix_ * v).normalized();
        op_norm_ = v.dot(matrix_ * v);
        const double shift = op_norm_ + 1.0;
        Vector w(n);
        for (Eigen::Index i = 0; i < n; ++i) w[i] = rng.normal();
        w.normalize();
        for (int it = 0; it < 200; ++it) w = (shift * w - matrix_ * w).normalized();
        min_eig = w.dot(matrix_ * w);
    }
    if (!(min_eig >= alpha_ - kSpectralTol)) {
        throw InvalidMetricError("metric smallest eigenvalue " + std::to_string(min_eig) +
                                 " is below alpha = " + std::to_string(alpha_));
    }

    diagonal_ = true;
    for (Eigen::Index i = 0; i < n && diagonal_; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && matrix_(i, j) != 0.0) {
                diagonal_ = false;
                break;
            }
        }
    }

    ldlt_.compute(matrix_);
    if (n <= 4) {
        inverse_ = matrix_.inverse();
        has_inverse_ = true;
    }
}

Metric Metric::scaled_identity(Eigen::Index dim, double lambda) {
    return Metric(Matrix(lambda * Matrix::Identity(dim, dim)), lambda);
}

Metric Metric::diagonal(const Vector& d) {
    return Metric(Matrix(d.asDiagonal()), d.minCoeff());
}

bool Metric::is_scalar(double& lambda) const {
    if (!diagonal_) return false;
    lambda = matrix_(0, 0);
    for (Eigen::Index i = 1; i < matrix_.rows(); ++i) {
        if (matrix_(i, i) != lambda) return false;
    }
    return true;
}

Vector Metric::apply(const Vector& x) const {
    if (x.size() != dim()) throw DimensionError("Metric::apply", dim(), x.size());
    return matrix_ * x;
}

Vector Metric::solve(const Vector& x) const {
    if (x.size() != dim()) throw DimensionError("Metric::solve", dim(), x.size());
    const Vector d = ldlt_.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    const double rcond = (dmax > 0.0) ? dmin / dmax : 0.0;
    if (!(rcond > kRcondFloor)) {
        throw SingularMetricError(rcond > 0.0 ? 1.0 / rcond
                                              : std::numeric_limits<double>::infinity());
    }
    if (has_inverse_) return inverse_ * x;
    return ldlt_.solve(x);
}

double metric_norm(const Metric& w, const Vector& x) {
    if (x.size() != w.dim()) throw DimensionError("metric_norm", w.dim(), x.size());
    return std::sqrt(std::max(0.0, x.dot(w.apply(x))));
}

double inverse_metric_norm(const Metric& w, const Vector& x) {
    if (x.size() != w.dim()) throw DimensionError("inverse_metric_norm", w.dim(), x.size());
    return std::sqrt(std::max(0.0, x.dot(w.solve(x))));
}

MetricSequence MetricSequence::decaying_diagonal(const Vector& kappa) {
    const double kmax = kappa.maxCoeff();
    if (kappa.minCoeff() < 0.0) {
        throw InvalidMetricError("decaying_diagonal requires nonnegative kappa");
    }
    Vector k = kappa;
    MetricSequence seq;
    seq.at = [k](std::size_t n) {
        const double decay = std::pow(0.5, static_cast<double>(n));
        Vector d = Vector::Ones(k.size()) + decay * k;
        return Metric::diagonal(d);
    };
    seq.eta = [kmax](std::size_t n) { return kmax * std::pow(0.5, static_cast<double>(n + 1)); };
    seq.eta_total = kmax;  // sum_{n>=0} kmax 2^-(n+1) = kmax
    seq.mu = 1.0 + kmax;
    seq.alpha = 1.0;
    return seq;
}

MetricSequence MetricSequence::constant(Metric m) {
    MetricSequence seq;
    const double norm = m.operator_norm();
    const double alpha = m.alpha();
    seq.at = [m = std::move(m)](std::size_t) { return m; };
    seq.eta = [](std::size_t) { return 0.0; };
    seq.eta_total = 0.0;
    seq.mu = norm;
    seq.alpha = alpha;
    return seq;
}

MetricSequenceReport check_metric_sequence(const MetricSequence& seq, std::size_t horizon,
                                           std::size_t samples, std::uint64_t rng_seed) {
    MetricSequenceReport report;
    if (horizon < 1 || samples < 1) {
        throw Error("check_metric_sequence: horizon and samples must be >= 1");
    }
    SampleStream rng(rng_seed);
    Metric current = seq.at(0);
    const Eigen::Index dim = current.dim();
    report.pass = true;
    for (std::size_t n = 0; n < horizon; ++n) {
        Metric next = seq.at(n + 1);
        const double eta_n = seq.eta(n);
        MetricSequenceReport::Row row{n, std::numeric_limits<double>::infinity(),
                                      std::numeric_limits<double>::infinity(),
                                      seq.mu - current.operator_norm()};
        for (std::size_t s = 0; s < samples; ++s) {
            Vector x(dim);
            for (Eigen::Index i = 0; i < dim; ++i) x[i] = rng.normal();
            const double nx = x.norm();
            if (nx > 0.0) x /= nx;
            const double qn = x.dot(current.apply(x));
            const double qn1 = x.dot(next.apply(x));
            row.growth_margin = std::min(row.growth_margin, (1.0 + eta_n) * qn1 - qn);
            row.floor_margin = std::min(row.floor_margin, qn - seq.alpha * x.squaredNorm());
        }
        if (row.growth_margin < -1e-10 || row.floor_margin < -1e-10 || row.norm_margin < -1e-10) {
            report.pass = false;
        }
        report.rows.push_back(row);
        current = std::move(next);
    }
    return report;
}

double ProductPoint::norm() const {
    double sq = primal.squaredNorm();
    for (const auto& v : duals) sq += v.squaredNorm();
    return std::sqrt(sq);
}

ProductPoint pack(Vector primal, std::vector<Vector> duals) {
    return ProductPoint{std::move(primal), std::move(duals)};
}

std::pair<Vector, std::vector<Vector>> unpack(const ProductPoint& p) {
    return {p.primal, p.duals};
}

Vector flatten(const Vector& primal, const std::vector<Vector>& duals) {
    Eigen::Index total = primal.size();
    for (const auto& v : duals) total += v.size();
    Vector out(total);
    out.head(primal.size()) = primal;
    Eigen::Index offset = primal.size();
    for (const auto& v : duals) {
        out.segment(offset, v.size()) = v;
        offset += v.size();
    }
    return out;
}

void split(const Vector& packed, Eigen::Index primal_dim,
           const std::vector<Eigen::Index>& dual_dims, Vector& primal,
           std::vector<Vector>& duals) {
    Eigen::Index total = primal_dim;
    for (auto d : dual_dims) total += d;
    if (packed.size() != total) throw DimensionError("split", total, packed.size());
    primal = packed.head(primal_dim);
    duals.resize(dual_dims.size());
    Eigen::Index offset = primal_dim;
    for (std::size_t i = 0; i < dual_dims.size(); ++i) {
        duals[i] = packed.segment(offset, dual_dims[i]);
        offset += dual_dims[i];
    }
}

}  // namespace fbfsplit

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbfsplit/errors.hpp"

namespace fbfsplit {

// Elements of the ambient finite-dimensional real Hilbert spaces.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

bool is_finite(const Vector& x);

// Self-adjoint positive-definite operator with spectrum bounded below by
// alpha > 0.  Validated eagerly at construction: symmetry to 1e-12 relative,
// smallest eigenvalue >= alpha - 1e-10 (eigendecomposition up to dim 512,
// randomized Rayleigh probing above).
class Metric {
public:
    Metric(Matrix m, double alpha);

    // Scalar multiple of the identity.
    static Metric scaled_identity(Eigen::Index dim, double lambda);
    static Metric identity(Eigen::Index dim) { return scaled_identity(dim, 1.0); }
    static Metric diagonal(const Vector& d);

    const Matrix& matrix() const { return matrix_; }
    double alpha() const { return alpha_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    // Operator 2-norm (largest eigenvalue; the metric is positive definite).
    double operator_norm() const { return op_norm_; }

    bool is_diagonal() const { return diagonal_; }
    // True when the matrix is exactly lambda * Id; lambda returned through out.
    bool is_scalar(double& lambda) const;

    Vector apply(const Vector& x) const;
    // Solves W y = x; never forms an explicit inverse above dim 4.
    Vector solve(const Vector& x) const;

private:
    Matrix matrix_;
    double alpha_;
    double op_norm_;
    bool diagonal_;
    Eigen::LDLT<Matrix> ldlt_;
    Matrix inverse_;   // only populated for dim <= 4
    bool has_inverse_ = false;
};

// ||x||_W = sqrt(<Wx, x>).
double metric_norm(const Metric& w, const Vector& x);

// ||x||_{W^-1} = sqrt(<W^-1 x, x>), computed through a linear solve.
double inverse_metric_norm(const Metric& w, const Vector& x);

// Sequence (U_n) in P_alpha with sup-norm bound mu and summable growth
// sequence eta_n: (1+eta_n) <x, U_{n+1} x> >= <x, U_n x> >= alpha ||x||^2.
struct MetricSequence {
    std::function<Metric(std::size_t)> at;
    std::function<double(std::size_t)> eta;
    double eta_total = 0.0;  // closed-form or tail bound for sum eta_n
    double mu = 1.0;
    double alpha = 1.0;

    // U_n = diag(1 + kappa_i * 2^-n), eta_n = max(kappa) * 2^-(n+1),
    // alpha = 1, mu = 1 + max(kappa).
    static MetricSequence decaying_diagonal(const Vector& kappa);
    static MetricSequence constant(Metric m);
};

struct MetricSequenceReport {
    struct Row {
        std::size_t n;
        double growth_margin;  // (1+eta_n)<x,U_{n+1}x> - <x,U_n x>, worst sample
        double floor_margin;   // <x,U_n x> - alpha ||x||^2, worst sample
        double norm_margin;    // mu - ||U_n||
    };
    std::vector<Row> rows;
    bool pass = false;
};

// Samples unit vectors and reports the worst violation margins of the
// inequalities defining the sequence class over n < horizon.  Violations are
// report content, not errors; pass iff every margin >= -1e-10.
MetricSequenceReport check_metric_sequence(const MetricSequence& seq, std::size_t horizon,
                                           std::size_t samples, std::uint64_t rng_seed);

// Point of the direct sum K = H (+) G_1 (+) ... (+) G_m.
struct ProductPoint {
    Vector primal;
    std::vector<Vector> duals;

    double norm() const;
};

ProductPoint pack(Vector primal, std::vector<Vector> duals);
std::pair<Vector, std::vector<Vector>> unpack(const ProductPoint& p);

// Flat-vector packing used by the lifted solvers.
Vector flatten(const Vector& primal, const std::vector<Vector>& duals);
void split(const Vector& packed, Eigen::Index primal_dim,
           const std::vector<Eigen::Index>& dual_dims, Vector& primal,
           std::vector<Vector>& duals);

}  // namespace fbfsplit

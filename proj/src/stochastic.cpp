#include "fbfsplit/stochastic.hpp"

#include <cmath>
#include <limits>

#include "fbfsplit/rng.hpp"

namespace fbfsplit {

NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "zero") return NoiseKind::Zero;
    if (s == "gaussian_geometric") return NoiseKind::GaussianGeometric;
    if (s == "bounded_uniform_geometric") return NoiseKind::BoundedUniformGeometric;
    throw Error("unknown noise kind '" + s + "'");
}

std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::Zero: return "zero";
        case NoiseKind::GaussianGeometric: return "gaussian_geometric";
        case NoiseKind::BoundedUniformGeometric: return "bounded_uniform_geometric";
    }
    return "?";
}

NoiseSchedule NoiseSchedule::zero(Eigen::Index dim) {
    NoiseSchedule s;
    s.kind = NoiseKind::Zero;
    s.dim = dim;
    return s;
}

NoiseSchedule NoiseSchedule::gaussian_geometric(double sigma, double rho, Eigen::Index dim) {
    if (!(sigma >= 0.0)) throw Error("noise sigma must be nonnegative");
    NoiseSchedule s;
    s.kind = NoiseKind::GaussianGeometric;
    s.sigma = sigma;
    s.rho = rho;
    s.dim = dim;
    return s;
}

NoiseSchedule NoiseSchedule::bounded_uniform_geometric(double sigma, double rho,
                                                       Eigen::Index dim) {
    if (!(sigma >= 0.0)) throw Error("noise sigma must be nonnegative");
    NoiseSchedule s;
    s.kind = NoiseKind::BoundedUniformGeometric;
    s.sigma = sigma;
    s.rho = rho;
    s.dim = dim;
    return s;
}

NoiseSchedule NoiseSchedule::with_stream(std::uint64_t seed_, std::uint32_t slot_) const {
    NoiseSchedule s = *this;
    s.seed = seed_;
    s.slot = slot_;
    return s;
}

NoiseSchedule NoiseSchedule::with_dim(Eigen::Index d) const {
    NoiseSchedule s = *this;
    s.dim = d;
    return s;
}

Vector NoiseSchedule::sample(std::size_t n) const {
    if (kind == NoiseKind::Zero) return Vector::Zero(dim);
    const double scale = sigma * std::pow(rho, static_cast<double>(n));
    Philox engine(seed);
    Vector out(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        // Counter layout: (iteration, entry, slot, tag); draw order within the
        // triple is a, b, c (slot 0, 1, 2), entry-major.
        const Philox::Counter words = engine(
            {static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(j), slot, 0x0A11CEu});
        const double u1 = Philox::to_unit(words[0], words[1]);
        if (kind == NoiseKind::GaussianGeometric) {
            const double u2 = Philox::to_unit(words[2], words[3]);
            const double r = std::sqrt(-2.0 * std::log1p(-u1));
            out[j] = scale * r * std::cos(6.283185307179586476925286766559 * u2);
        } else {
            out[j] = scale * (2.0 * u1 - 1.0);
        }
    }
    return out;
}

double NoiseSchedule::conditional_moment(std::size_t n) const {
    switch (kind) {
        case NoiseKind::Zero: return 0.0;
        case NoiseKind::GaussianGeometric:
            return sigma * std::pow(rho, static_cast<double>(n)) *
                   std::sqrt(static_cast<double>(dim));
        case NoiseKind::BoundedUniformGeometric:
            return sigma * std::pow(rho, static_cast<double>(n)) *
                   std::sqrt(static_cast<double>(dim) / 3.0);
    }
    return 0.0;
}

double NoiseSchedule::summability_total() const {
    if (kind == NoiseKind::Zero || sigma == 0.0) return 0.0;
    if (rho >= 1.0) return std::numeric_limits<double>::infinity();
    return conditional_moment(0) / (1.0 - rho);
}

bool NoiseSchedule::summable() const { return std::isfinite(summability_total()); }

SummabilityResult verify_summability(const NoiseSchedule& s) {
    SummabilityResult r;
    r.total = s.summability_total();
    r.pass = std::isfinite(r.total);
    return r;
}

NoiseTriple NoiseTriple::zero(Eigen::Index dim) {
    return NoiseTriple{NoiseSchedule::zero(dim), NoiseSchedule::zero(dim),
                       NoiseSchedule::zero(dim)};
}

NoiseTriple NoiseTriple::uniform_kind(const NoiseSchedule& proto, Eigen::Index dim) {
    NoiseTriple t{proto.with_dim(dim), proto.with_dim(dim), proto.with_dim(dim)};
    t.a.slot = 0;
    t.b.slot = 1;
    t.c.slot = 2;
    return t;
}

NoiseTriple NoiseTriple::with_seed(std::uint64_t seed) const {
    NoiseTriple t = *this;
    t.a = t.a.with_stream(seed, 0);
    t.b = t.b.with_stream(seed, 1);
    t.c = t.c.with_stream(seed, 2);
    return t;
}

NoiseTriple NoiseTriple::with_dim(Eigen::Index d) const {
    return NoiseTriple{a.with_dim(d), b.with_dim(d), c.with_dim(d)};
}

bool NoiseTriple::is_zero() const {
    return a.kind == NoiseKind::Zero && b.kind == NoiseKind::Zero && c.kind == NoiseKind::Zero;
}

}  // namespace fbfsplit

#pragma once

#include <cstdint>
#include <string>

#include "fbfsplit/space.hpp"

namespace fbfsplit {

enum class NoiseKind { Zero, GaussianGeometric, BoundedUniformGeometric };

NoiseKind noise_kind_from_string(const std::string& s);
std::string to_string(NoiseKind k);

// Error-sequence generator with analytically known conditional second
// moments.  Draws are independent of the iterate path, so conditional and
// unconditional moments coincide and summability is checkable in closed
// form.  Entries at iteration n:
//   gaussian_geometric:        N(0, (sigma rho^n)^2)
//   bounded_uniform_geometric: U[-sigma rho^n, sigma rho^n]
// Sampling is counter-indexed (Philox keyed by seed^slot, counter (n, entry)),
// so a fixed seed reproduces the identical stream bit-exactly.
struct NoiseSchedule {
    NoiseKind kind = NoiseKind::Zero;
    double sigma = 0.0;
    double rho = 0.0;
    Eigen::Index dim = 0;
    std::uint64_t seed = 0;
    std::uint32_t slot = 0;  // 0 = a, 1 = b, 2 = c

    static NoiseSchedule zero(Eigen::Index dim);
    static NoiseSchedule gaussian_geometric(double sigma, double rho, Eigen::Index dim);
    static NoiseSchedule bounded_uniform_geometric(double sigma, double rho, Eigen::Index dim);

    NoiseSchedule with_stream(std::uint64_t seed, std::uint32_t slot) const;
    NoiseSchedule with_dim(Eigen::Index d) const;

    Vector sample(std::size_t n) const;

    // sqrt(E ||.||^2) at iteration n, in closed form.
    double conditional_moment(std::size_t n) const;

    // Closed-form series total sum_n conditional_moment(n); infinite when
    // rho >= 1.
    double summability_total() const;
    bool summable() const;
};

// The three error slots (a_n, b_n, c_n) of one iteration.
struct NoiseTriple {
    NoiseSchedule a, b, c;

    static NoiseTriple zero(Eigen::Index dim);
    static NoiseTriple uniform_kind(const NoiseSchedule& proto, Eigen::Index dim);

    NoiseTriple with_seed(std::uint64_t seed) const;
    NoiseTriple with_dim(Eigen::Index d) const;
    bool is_zero() const;
};

struct SummabilityResult {
    double total = 0.0;
    bool pass = false;
};

SummabilityResult verify_summability(const NoiseSchedule& s);

}  // namespace fbfsplit

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace fbfsplit {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).  Stateless:
// each 128-bit counter maps to four 32-bit words under a 64-bit key, so draws
// are randomly accessible and bit-exact across runs for a fixed seed.
class Philox {
public:
    using Counter = std::array<std::uint32_t, 4>;

    explicit Philox(std::uint64_t seed)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)) {}

    Counter operator()(Counter ctr) const {
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, k0, k1);
            k0 += 0x9E3779B9u;  // golden ratio
            k1 += 0xBB67AE85u;  // sqrt(3) - 1
        }
        return ctr;
    }

    // Uniform double in [0,1) from 53 random bits.
    static double to_unit(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(hi) << 21) ^ (static_cast<std::uint64_t>(lo) >> 11);
        return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
    }

private:
    static Counter single_round(const Counter& c, std::uint32_t k0, std::uint32_t k1) {
        const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
        const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
        return Counter{
            static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0,
            static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1,
            static_cast<std::uint32_t>(p0),
        };
    }

    std::uint32_t key0_;
    std::uint32_t key1_;
};

// Convenience sequential sampler on top of Philox for test-time sampling
// (random vectors, sampled pairs).  Not used by noise schedules, which index
// counters directly.
class SampleStream {
public:
    explicit SampleStream(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        const auto w = next_words();
        return Philox::to_unit(w[0], w[1]);
    }

    // Uniform on [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller (cosine branch).
    double normal() {
        const auto w = next_words();
        const double u1 = Philox::to_unit(w[0], w[1]);
        const double u2 = Philox::to_unit(w[2], w[3]);
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    Philox::Counter next_words() {
        Philox::Counter ctr{static_cast<std::uint32_t>(index_),
                            static_cast<std::uint32_t>(index_ >> 32), 0u, 0xFACADEu};
        ++index_;
        return engine_(ctr);
    }

    Philox engine_;
    std::uint64_t index_ = 0;
};

}  // namespace fbfsplit

#ifndef FANOVA_RNG_HPP
#define FANOVA_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fanova {

// Deterministic cross-platform randomness. Every stream is a splitmix64
// sequence; substreams are derived by hashing (seed, stream index) so that
// workers can consume their streams in any schedule and still reproduce
// bit-identical results.
class RngStream {
  public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    /// Substream `index` of the generator family keyed by `seed`.
    static RngStream derive(std::uint64_t seed, std::uint64_t index) {
        return RngStream(mix(mix(seed) ^ mix(index + 0x9E3779B97F4A7C15ULL)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform integer in [0, bound), bound >= 1. Unbiased via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal draw (Box-Muller). Always consumes two uniforms.
    double next_gaussian() {
        double u1 = next_unit();
        const double u2 = next_unit();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace fanova

#endif

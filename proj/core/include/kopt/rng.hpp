#pragma once

#include <cmath>
#include <cstdint>

namespace kopt::rng {

/// SplitMix64: the counter-based generator used everywhere in this project.
/// The state advances by a fixed odd constant and each output is a strong
/// 64-bit mix of the state, so a stream is fully determined by its seed.
/// Parallel streams are derived as seed ^ stream_index (see stream_seed).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via the Marsaglia polar method (no trig, pairwise cached).
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

  private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Per-trial stream derivation: trial k of an experiment seeded with `seed`
/// draws from SplitMix64(stream_seed(seed, k)).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream_index) {
    return seed ^ stream_index;
}

}  // namespace kopt::rng

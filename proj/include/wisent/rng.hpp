#pragma once

#include <cmath>
#include <cstdint>

namespace wisent {

/**
 * Small deterministic RNG used everywhere randomness is needed. A fixed
 * generator (splitmix64) is used instead of std:: distributions so that
 * identical seeds give bit-identical streams on every platform and
 * standard library.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via the polar Box-Muller method.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_double() - 1.0;
            v = 2.0 * next_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Derives an independent sub-stream seed for a named purpose.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t purpose) {
    Rng r(seed ^ (0xA0761D6478BD642Full * (purpose + 1)));
    return r.next_u64();
}

}  // namespace wisent

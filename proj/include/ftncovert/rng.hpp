#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace ftn {

// splitmix64 (Steele/Lea/Vigna): one 64-bit state, closed-form increment.
// Chosen so any (seed, index) pair addresses an independent stream cheaply;
// cross-language reproduction needs only these two functions.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Independent child seed for (base, index); used for per-row, per-chunk and
// per-draw stream derivation everywhere a seed fans out.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = index;
    std::uint64_t m = splitmix64_next(s);
    s = base ^ m;
    return splitmix64_next(s);
}

// Sequential stream over splitmix64. Normals use the Marsaglia polar method.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform on (0,1), both endpoints excluded (safe under log)
    double uniform() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1p-52;
    }

    // Marsaglia polar method: two independent standard normals per accept.
    std::pair<double, double> normal_pair() {
        for (;;) {
            const double x = 2.0 * uniform() - 1.0;
            const double y = 2.0 * uniform() - 1.0;
            const double s = x * x + y * y;
            if (s >= 1.0 || s == 0.0) continue;
            const double m = std::sqrt(-2.0 * std::log(s) / s);
            return {x * m, y * m};
        }
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [a, b] = normal_pair();
        spare_ = b;
        have_spare_ = true;
        return a;
    }

    // |CN(0,2)|^2 = X^2 + Y^2 with X,Y ~ N(0,1); inside the polar accept,
    // X^2 + Y^2 = -2 log s exactly, so the sqrt is skipped.
    double cn_norm_sq2() {
        for (;;) {
            const double x = 2.0 * uniform() - 1.0;
            const double y = 2.0 * uniform() - 1.0;
            const double s = x * x + y * y;
            if (s >= 1.0 || s == 0.0) continue;
            return -2.0 * std::log(s);
        }
    }

    // |h|^2 for h ~ CN(0,1): Exponential(mean 1)
    double fading_gain_sq() { return 0.5 * cn_norm_sq2(); }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}

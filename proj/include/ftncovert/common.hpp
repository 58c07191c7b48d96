#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ftn {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// sin(pi x)/(pi x), fixed to 1 at x = 0.
inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = pi * x;
    return std::sin(px) / px;
}

// x - log(1+x), each term of the divergence sum; >= 0 for x > -1.
// Direct evaluation cancels catastrophically for small x, so switch to the
// alternating series x^2/2 - x^3/3 + ... below |x| = 0.05.
inline double x_minus_log1p(double x) {
    if (std::abs(x) >= 0.05) return x - std::log1p(x);
    double term = x * x;     // x^k, k = 2
    double sum = term / 2.0;
    for (int k = 3; k <= 12; ++k) {
        term *= -x;
        sum += term / k;
    }
    return sum;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

}

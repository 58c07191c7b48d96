#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ftn {

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    std::size_t nodes = 0;
};

// Composite Simpson over [a,b] with n intervals (n even).
template <class F>
double simpson(F&& f, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < n; i += 2) odd += f(a + h * static_cast<double>(i));
    for (std::size_t i = 2; i < n; i += 2) even += f(a + h * static_cast<double>(i));
    return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

// Simpson with interval doubling and Richardson extrapolation ((I2-I1)/15).
// Accepts when the extrapolated correction meets max(abs_tol, rel_tol*|I|).
template <class F>
QuadResult simpson_adaptive(F&& f, double a, double b, std::size_t n0,
                            double rel_tol, double abs_tol,
                            int max_doublings = 12) {
    if (b <= a) return {0.0, 0.0, 0};
    std::size_t n = std::max<std::size_t>(n0 + (n0 & 1), 2);
    double i1 = simpson(f, a, b, n);
    for (int d = 0; d < max_doublings; ++d) {
        n *= 2;
        const double i2 = simpson(f, a, b, n);
        const double corr = (i2 - i1) / 15.0;
        const double value = i2 + corr;
        if (std::abs(corr) <= std::max(abs_tol, rel_tol * std::abs(value)))
            return {value, std::abs(corr), n + 1};
        i1 = i2;
    }
    throw std::runtime_error("quadrature: Simpson refinement did not meet tolerance");
}

// Integrate over [a,b] split at the given interior breakpoints (integrand kinks);
// each smooth segment gets nodes proportional to its length, n_total in aggregate.
template <class F>
QuadResult integrate_segmented(F&& f, double a, double b,
                               std::vector<double> breakpoints,
                               std::size_t n_total, double rel_tol, double abs_tol) {
    if (b <= a) return {0.0, 0.0, 0};
    std::vector<double> pts{a, b};
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    QuadResult total;
    const double span = b - a;
    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        const double len = pts[s + 1] - pts[s];
        auto n0 = static_cast<std::size_t>(
            std::ceil(static_cast<double>(n_total) * len / span));
        n0 = std::max<std::size_t>(n0, 8);
        // per-segment absolute budget scales with length share
        const QuadResult r = simpson_adaptive(f, pts[s], pts[s + 1], n0, rel_tol,
                                              abs_tol * len / span);
        total.value += r.value;
        total.err_est += r.err_est;
        total.nodes += r.nodes;
    }
    return total;
}

}

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "ftncovert/ftncovert.hpp"

// Independent oracles for the numerical claims under test. Everything here is
// derived from scratch (dense linear algebra, closed forms, brute quadrature)
// so a library bug cannot cancel against itself.
namespace oracle {

inline double w1_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

// Relative entropy between the two zero-mean circular Gaussians seen by the
// detector, straight from the dense matrices:
//   D = tr(S0^-1 S1) - n - log det(S0^-1 S1).
inline double dense_kl(const ftn::IsiMatrix& g, const ftn::LinkState& link) {
    const int n = g.n;
    const Eigen::MatrixXd s0 = link.sigma_w_sq * g.entries;
    const Eigen::MatrixXd s1 =
        link.h_aw_sq * link.sigma_a_sq * g.entries * g.entries.transpose() + s0;
    const Eigen::MatrixXd m = s0.llt().solve(s1);
    return m.trace() - n - std::log(m.partialPivLu().determinant());
}

// Root-raised-cosine impulse response, unit-energy normalization. Used only to
// cross-check the autocorrelation closed form by brute-force convolution.
inline double rrc_impulse(double t, const ftn::PulseConfig& cfg) {
    const double a = cfg.alpha, T = cfg.T;
    const double x = t / T;
    if (std::abs(x) < 1e-9) return (1.0 + a * (4.0 / ftn::pi - 1.0)) / std::sqrt(T);
    if (std::abs(std::abs(x) - 1.0 / (4.0 * a)) < 1e-9) {
        const double s = ftn::pi / (4.0 * a);
        return a / std::sqrt(2.0 * T)
               * ((1.0 + 2.0 / ftn::pi) * std::sin(s) + (1.0 - 2.0 / ftn::pi) * std::cos(s));
    }
    const double num = std::sin(ftn::pi * x * (1.0 - a)) + 4.0 * a * x * std::cos(ftn::pi * x * (1.0 + a));
    const double den = ftn::pi * x * (1.0 - 16.0 * a * a * x * x);
    return num / den / std::sqrt(T);
}

// brute-force pulse autocorrelation Int h(s) h(s - t) ds
inline double rrc_autocorr_numeric(double t, const ftn::PulseConfig& cfg) {
    const double L = 30.0 * cfg.T;
    const int n = 60000;  // Simpson, even
    const double h = 2.0 * L / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = -L + h * i;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * rrc_impulse(u, cfg) * rrc_impulse(u - t, cfg);
    }
    return s * h / 3.0;
}

// P(sum_i kappa_i E_i > theta), E_i ~ Exp(mean 2), distinct kappa_i > 0
inline double hypoexp_tail(const std::vector<double>& kappa, double theta) {
    double p = 0.0;
    for (std::size_t i = 0; i < kappa.size(); ++i) {
        double w = 1.0;
        for (std::size_t j = 0; j < kappa.size(); ++j)
            if (j != i) w *= kappa[i] / (kappa[i] - kappa[j]);
        p += w * std::exp(-theta / (2.0 * kappa[i]));
    }
    return p;
}

// P(kappa * Gamma(n, 2) > theta): Erlang tail, u = theta / (2 kappa).
// Summed in log space; the plain power series overflows by n ~ 1000.
inline double erlang_tail(double kappa, int n, double theta) {
    const double u = theta / (2.0 * kappa);
    std::vector<double> ls(static_cast<std::size_t>(n));
    double lmax = -1e300;
    for (int k = 0; k < n; ++k) {
        ls[static_cast<std::size_t>(k)] =
            k == 0 ? -u : -u + k * std::log(u) - std::lgamma(k + 1.0);
        lmax = std::max(lmax, ls[static_cast<std::size_t>(k)]);
    }
    double s = 0.0;
    for (double l : ls) s += std::exp(l - lmax);
    return std::exp(lmax) * s;
}

// x - log(1 + x) summed term by term in long double, for the tiny-x branch
inline double xml1p_series_ref(double x) {
    long double s = 0.0L, p = static_cast<long double>(x);
    for (int k = 2; k <= 24; ++k) {
        p *= -static_cast<long double>(x);
        s -= p / k;  // -(-x)^k / k
    }
    return static_cast<double>(s);
}

}  // namespace oracle

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "common.hpp"
#include "isi.hpp"
#include "rng.hpp"

namespace ftn {

// One block-fading realization of the channel plus the symbol energy.
// P and sigma_a^2 are the same degree of freedom (P = sigma_a^2/(tau T));
// sigma_a^2 is stored, P is derived, so the pair can never disagree.
struct LinkState {
    double h_ab_sq = 1.0;     // |h_ab|^2
    double h_aw_sq = 1.0;     // |h_aw|^2
    double sigma_w_sq = 1.0;  // Watts
    double n0 = 2.0;          // W/Hz
    double sigma_a_sq = 0.0;  // Joules (symbol energy)

    void validate() const {
        if (!(h_ab_sq >= 0.0) || !std::isfinite(h_ab_sq))
            throw std::invalid_argument("link: h_ab_sq must be finite and >= 0");
        if (!(h_aw_sq >= 0.0) || !std::isfinite(h_aw_sq))
            throw std::invalid_argument("link: h_aw_sq must be finite and >= 0");
        if (!(sigma_w_sq > 0.0))
            throw std::invalid_argument("link: sigma_w_sq must be positive");
        if (!(n0 > 0.0))
            throw std::invalid_argument("link: n0 must be positive");
        if (!(sigma_a_sq >= 0.0))
            throw std::invalid_argument("link: sigma_a_sq must be >= 0");
    }

    double rho() const { return h_aw_sq / sigma_w_sq; }
    double power(const PulseConfig& cfg) const { return sigma_a_sq / cfg.symbol_interval(); }

    LinkState with_power(double p, const PulseConfig& cfg) const {
        LinkState l = *this;
        l.sigma_a_sq = p * cfg.symbol_interval();
        return l;
    }
};

// Willie's LRT in the eigenbasis: T1(y) = sum alpha_n |v_n|^2 against theta,
// with |v_n|^2 scaling to gamma_n |v|^2 (v ~ CN(0,2)) under H1.
struct DetectorModel {
    std::vector<double> alphas;
    std::vector<double> gammas;
    double theta = 0.0;      // = -log beta1 = sum log(1 + rho sigma_a^2 lambda_n)
    double log_beta1 = 0.0;

    int n() const { return static_cast<int>(alphas.size()); }
};

enum class Hypothesis { H0, H1 };

inline DetectorModel build_detector(const LinkState& link, const EigenSpectrum& spec) {
    link.validate();
    if (spec.n() < 1) throw std::invalid_argument("detection: empty spectrum");
    const double c = link.rho() * link.sigma_a_sq;
    DetectorModel det;
    det.alphas.resize(spec.values.size());
    det.gammas.resize(spec.values.size());
    double theta = 0.0;
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        const double lam = spec.values[i];
        if (lam < 0.0)
            throw std::invalid_argument("detection: negative eigenvalue");
        const double x = c * lam;
        det.alphas[i] = 0.5 * x / (x + 1.0);
        det.gammas[i] = 0.5 * x;
        theta += std::log1p(x);
    }
    det.theta = theta;
    det.log_beta1 = -theta;
    return det;
}

// The rotated observation y = V^T r_w; y[n] ~ CN(0, sigma_w^2 lambda_n) under H0
// and CN(0, sigma_w^2 lambda_n (rho sigma_a^2 lambda_n + 1)) under H1.
struct ObservationVector {
    std::vector<std::complex<double>> y;
    Hypothesis hypothesis = Hypothesis::H0;
};

inline ObservationVector draw_observation(const LinkState& link, const EigenSpectrum& spec,
                                          Hypothesis hyp, RngStream& rng) {
    const double c = link.rho() * link.sigma_a_sq;
    ObservationVector obs;
    obs.hypothesis = hyp;
    obs.y.resize(spec.values.size());
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        const double lam = spec.values[i];
        double var = link.sigma_w_sq * lam;
        if (hyp == Hypothesis::H1) var *= c * lam + 1.0;
        const double s = std::sqrt(0.5 * var);
        auto [re, im] = rng.normal_pair();
        obs.y[i] = {s * re, s * im};
    }
    return obs;
}

// Test statistic on whitened coordinates v[n] = y[n]/sqrt(sigma_w^2 lambda_n / 2).
inline double test_statistic(const DetectorModel& det, const LinkState& link,
                             const EigenSpectrum& spec, const ObservationVector& obs) {
    double t = 0.0;
    for (std::size_t i = 0; i < det.alphas.size(); ++i) {
        const double denom = 0.5 * link.sigma_w_sq * spec.values[i];
        t += det.alphas[i] * std::norm(obs.y[i]) / denom;
    }
    return t;
}

// One draw of T1 under the given hypothesis: sum kappa_n |v_n|^2 with
// |v_n|^2 = |CN(0,2)|^2 and kappa = alpha (H0) or gamma (H1).
inline double sample_statistic(const DetectorModel& det, Hypothesis hyp, RngStream& rng) {
    const auto& k = (hyp == Hypothesis::H0) ? det.alphas : det.gammas;
    double t = 0.0;
    for (double kn : k) t += kn * rng.cn_norm_sq2();
    return t;
}

struct McErrorProbs {
    double p_fa = 0.0;
    double p_md = 0.0;
    double ci_halfwidth = 0.0;  // 1.96 * max binomial standard error
};

namespace detail {

// Weights paired to draw indices in descending order. The draws are i.i.d., so
// the pairing is distribution-neutral; it maximizes overlap of the common
// random numbers when two detectors of different length share a seed.
inline std::vector<double> sorted_desc(const std::vector<double>& v) {
    std::vector<double> s(v);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

inline constexpr std::uint64_t mc_chunk = 65536;

// |v|^2 draw addressed by (chunk seed, hypothesis, trial-in-chunk, dim).
// Counter addressing keeps every draw independent of the detector length,
// which is what makes common-random-number comparisons across schemes line up.
inline double statistic_draw(std::uint64_t chunk_seed, int hyp_tag,
                             std::uint64_t local_t, std::uint64_t n) {
    const std::uint64_t key = (static_cast<std::uint64_t>(hyp_tag) << 40)
                            | (local_t << 20) | n;
    RngStream s(derive_seed(chunk_seed, key));
    return s.cn_norm_sq2();
}

}  // namespace detail

// Monte Carlo false-alarm / miss-detection rates, deterministic under seed.
// Trials are processed in 65536-trial chunks with per-chunk streams derived
// from (seed, chunk index); counts are integers, so accumulation order is
// irrelevant. Ties T1 = theta decide for D1.
inline McErrorProbs error_probs_mc(const DetectorModel& det, std::uint64_t trials,
                                   std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("detection: trials must be >= 1");
    if (det.n() >= (1 << 20))
        throw std::invalid_argument("detection: block too long for the draw addressing");
    const std::vector<double> a = detail::sorted_desc(det.alphas);
    const std::vector<double> g = detail::sorted_desc(det.gammas);
    std::uint64_t fa = 0, md = 0;
    for (std::uint64_t chunk = 0; chunk * detail::mc_chunk < trials; ++chunk) {
        const std::uint64_t chunk_seed = derive_seed(seed, chunk);
        const std::uint64_t lo = chunk * detail::mc_chunk;
        const std::uint64_t hi = std::min(trials, lo + detail::mc_chunk);
        for (std::uint64_t t = lo; t < hi; ++t) {
            const std::uint64_t local = t - lo;
            double t0 = 0.0, t1 = 0.0;
            for (std::size_t n = 0; n < a.size(); ++n)
                t0 += a[n] * detail::statistic_draw(chunk_seed, 0, local, n);
            for (std::size_t n = 0; n < g.size(); ++n)
                t1 += g[n] * detail::statistic_draw(chunk_seed, 1, local, n);
            if (t0 >= det.theta) ++fa;
            if (t1 < det.theta) ++md;
        }
    }
    McErrorProbs r;
    r.p_fa = static_cast<double>(fa) / static_cast<double>(trials);
    r.p_md = static_cast<double>(md) / static_cast<double>(trials);
    const double se_fa = std::sqrt(r.p_fa * (1.0 - r.p_fa) / static_cast<double>(trials));
    const double se_md = std::sqrt(r.p_md * (1.0 - r.p_md) / static_cast<double>(trials));
    r.ci_halfwidth = 1.96 * std::max(se_fa, se_md);
    return r;
}

struct CfOptions {
    double tail_tol = 1e-12;  // bound on the discarded oscillatory tail
    double abs_tol = 1e-10;   // Richardson acceptance, probability scale
    double rel_tol = 1e-8;
    int max_doublings = 14;
    std::size_t max_nodes = 1u << 26;
    // > 0: merge the weight multiset down to this many quantile buckets
    // (mean-preserving). Approximation knob for very long blocks; 0 = exact.
    std::size_t max_distinct = 0;
};

struct CfErrorProbs {
    double p_fa = 0.0;
    double p_md = 0.0;
};

namespace detail {

struct WeightedKappas {
    std::vector<double> kappa;
    std::vector<double> count;
    double total_count = 0.0;
    double sum_kappa = 0.0;
};

inline WeightedKappas group_kappas(const std::vector<double>& raw, std::size_t max_distinct) {
    std::vector<double> k;
    k.reserve(raw.size());
    for (double v : raw)
        if (v > 0.0) k.push_back(v);
    std::sort(k.begin(), k.end(), std::greater<>());
    WeightedKappas w;
    if (k.empty()) return w;
    // exact run-length grouping first (plateau eigenvalues repeat exactly)
    std::vector<double> kv, kc;
    for (std::size_t i = 0; i < k.size();) {
        std::size_t j = i;
        while (j < k.size() && k[j] == k[i]) ++j;
        kv.push_back(k[i]);
        kc.push_back(static_cast<double>(j - i));
        i = j;
    }
    if (max_distinct > 0 && kv.size() > max_distinct) {
        // quantile buckets over the sorted multiset, replaced by their means
        std::vector<double> bv, bc;
        const double per = static_cast<double>(k.size()) / static_cast<double>(max_distinct);
        std::size_t idx = 0;
        for (std::size_t b = 0; b < max_distinct; ++b) {
            const auto end = static_cast<std::size_t>(std::llround(per * static_cast<double>(b + 1)));
            double sum = 0.0;
            std::size_t cnt = 0;
            for (; idx < std::min(end, k.size()); ++idx, ++cnt) sum += k[idx];
            if (cnt == 0) continue;
            bv.push_back(sum / static_cast<double>(cnt));
            bc.push_back(static_cast<double>(cnt));
        }
        kv = std::move(bv);
        kc = std::move(bc);
    }
    w.kappa = std::move(kv);
    w.count = std::move(kc);
    for (std::size_t i = 0; i < w.kappa.size(); ++i) {
        w.total_count += w.count[i];
        w.sum_kappa += w.kappa[i] * w.count[i];
    }
    return w;
}

// P(sum kappa_n |v_n|^2 > theta), |v_n|^2 ~ Exp(mean 2), via the Gil-Pelaez
// inversion of phi(w) = prod (1 - 2j kappa_n w)^-1:
//   P = 1/2 + (1/pi) Int_0^inf sin(Theta(w) - w theta) / (w R(w)) dw,
//   Theta = sum atan(2 kappa w),  log R = 1/2 sum log(1 + 4 kappa^2 w^2).
// Truncation at Omega chosen so the phase derivative is dominated by -theta
// and the residual tail bound falls under tail_tol; the leading boundary term
// of integration by parts, A cos(phase)/phase', is added back as a correction.
inline double gil_pelaez_tail(const WeightedKappas& w, double theta, const CfOptions& opt) {
    const std::size_t m = w.kappa.size();
    if (m == 0) return theta <= 0.0 ? 1.0 : 0.0;
    if (!(theta > 0.0)) return 1.0;

    const auto theta_of = [&](double om) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w.count[i] * std::atan(2.0 * w.kappa[i] * om);
        return s;
    };
    const auto log_r = [&](double om) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double t = 2.0 * w.kappa[i] * om;
            s += w.count[i] * std::log1p(t * t);
        }
        return 0.5 * s;
    };
    const auto theta_deriv = [&](double om) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double t = 2.0 * w.kappa[i] * om;
            s += w.count[i] * 2.0 * w.kappa[i] / (1.0 + t * t);
        }
        return s;
    };

    const double kmax = w.kappa.front();
    double omega = std::max(2.0 / theta, 1.0 / (2.0 * kmax));
    const double nn = w.total_count;
    for (int grow = 0;; ++grow) {
        if (grow > 2000)
            throw std::runtime_error("detection: CF truncation search failed");
        const double amp = std::exp(-log_r(omega)) / omega;
        const double err_tail = 8.0 * amp * (nn + 3.0) / (theta * theta * omega);
        if (theta_deriv(omega) <= 0.5 * theta && err_tail <= opt.tail_tol) break;
        omega *= 1.5;
    }

    const double f0 = 2.0 * w.sum_kappa - theta;  // integrand limit at w -> 0
    const auto integrand = [&](double om) {
        if (om == 0.0) return f0;
        return std::sin(theta_of(om) - om * theta) * std::exp(-log_r(om)) / om;
    };

    const double span = theta * omega + theta_of(omega);
    std::size_t nodes = std::max<std::size_t>(1u << 15,
        static_cast<std::size_t>(std::min(6.0 * span, 1e8)));
    nodes += nodes & 1;

    // Simpson with doubling: previous interior nodes become the even nodes,
    // only midpoints are freshly evaluated.
    const double ends = integrand(0.0) + integrand(omega);
    double odd = 0.0, interior = 0.0;
    {
        const double h = omega / static_cast<double>(nodes);
        for (std::size_t i = 1; i < nodes; i += 2) odd += integrand(h * static_cast<double>(i));
        for (std::size_t i = 2; i < nodes; i += 2) interior += integrand(h * static_cast<double>(i));
        interior += odd;
    }
    const auto simpson_val = [&](std::size_t n_, double odd_, double int_) {
        const double h = omega / static_cast<double>(n_);
        return h / 3.0 * (ends + 4.0 * odd_ + 2.0 * (int_ - odd_));
    };

    // tail correction from the first integration by parts
    const double vth = theta_of(omega) - omega * theta;
    const double vthp = theta_deriv(omega) - theta;  // <= -theta/2 by construction
    const double tail_c = std::exp(-log_r(omega)) / omega * std::cos(vth) / vthp;

    double i1 = simpson_val(nodes, odd, interior);
    for (int d = 0; d < opt.max_doublings; ++d) {
        if (nodes * 2 > opt.max_nodes)
            throw std::runtime_error("detection: CF quadrature exceeded the node budget");
        const double h = omega / static_cast<double>(nodes);
        double mid = 0.0;
        for (std::size_t i = 0; i < nodes; ++i)
            mid += integrand(h * (static_cast<double>(i) + 0.5));
        nodes *= 2;
        odd = mid;
        interior += mid;
        const double i2 = simpson_val(nodes, odd, interior);
        const double corr = (i2 - i1) / 15.0;
        const double p = 0.5 + (i2 + corr + tail_c) / pi;
        if (std::abs(corr) / pi <= std::max(opt.abs_tol, opt.rel_tol * std::abs(p)))
            return clamp01(p);
        i1 = i2;
    }
    throw std::runtime_error("detection: CF quadrature did not meet tolerance");
}

}  // namespace detail

// Exact error probabilities by characteristic-function inversion:
// p_fa = P(T1 > theta | H0), p_md = 1 - P(T1 > theta | H1).
inline CfErrorProbs error_probs_cf(const DetectorModel& det, const CfOptions& opt = {}) {
    CfErrorProbs r;
    if (det.theta <= 0.0) {
        // no signal: T1 = theta = 0 and the tie goes to D1
        r.p_fa = 1.0;
        r.p_md = 0.0;
        return r;
    }
    const auto a = detail::group_kappas(det.alphas, opt.max_distinct);
    const auto g = detail::group_kappas(det.gammas, opt.max_distinct);
    r.p_fa = detail::gil_pelaez_tail(a, det.theta, opt);
    r.p_md = 1.0 - detail::gil_pelaez_tail(g, det.theta, opt);
    return r;
}

}

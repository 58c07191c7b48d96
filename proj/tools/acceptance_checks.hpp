#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ftncovert/ftncovert.hpp"

// Desk-scale wired-in checks of the claims the library exists to reproduce.
// Tolerances are pinned here, next to the checks, on purpose.
namespace ftn::acceptance {

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;  // worst margin on pass, first failures otherwise
};

namespace detail {

inline std::string g3(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

struct Collector {
    bool pass = true;
    std::vector<std::string> notes;
    void fail(const std::string& s) {
        pass = false;
        if (notes.size() < 6) notes.push_back(s);
    }
    std::string join(const std::string& ok_note) const {
        if (pass) return ok_note;
        std::string s;
        for (const auto& n : notes) {
            if (!s.empty()) s += "; ";
            s += n;
        }
        return s;
    }
};

}  // namespace detail

// tau = 1: the Gram matrix is the identity and every derived quantity must
// collapse to the orthogonal-signaling closed form.
inline CheckResult criterion_nyquist_degeneration() {
    using detail::g3;
    detail::Collector c;
    const PulseConfig pc{0.3, 1.0, 1.0};
    const int n = 64;

    const IsiMatrix gm = build_isi_matrix(n, pc);
    double gdev = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            gdev = std::max(gdev, std::abs(gm.entries(i, j) - (i == j ? 1.0 : 0.0)));
    if (gdev > 1e-12) c.fail("Gram deviates from identity by " + g3(gdev));

    const EigenSpectrum spec = eigen_spectrum(gm);
    double ldev = 0.0;
    for (double v : spec.values) ldev = std::max(ldev, std::abs(v - 1.0));
    if (ldev > 1e-12) c.fail("eigenvalues deviate from 1 by " + g3(ldev));

    LinkState base;
    base.n0 = 2.0;
    const double p0 = 0.01;
    const DetectorModel det = build_detector(base.with_power(p0, pc), spec);
    const double theta_ref = n * std::log1p(p0);
    if (std::abs(det.theta - theta_ref) > 1e-9 * theta_ref)
        c.fail("theta off by rel " + g3(std::abs(det.theta - theta_ref) / theta_ref));
    const double d = kl_divergence(base.with_power(p0, pc), spec);
    const double d_ref = n * x_minus_log1p(p0);
    if (std::abs(d - d_ref) > 1e-9 * d_ref)
        c.fail("KL off by rel " + g3(std::abs(d - d_ref) / d_ref));

    const double eps = 0.01;
    const double p_spec = max_power_kl(base, spec, eps).p_max;
    const double p_nyq = max_power_nyquist(base, pc, n, {ConstraintKind::kl, eps}).p_max;
    const double p_rel = std::abs(p_spec - p_nyq) / p_nyq;
    if (p_rel > 1e-9) c.fail("p_max off by rel " + g3(p_rel));

    const double r_spec = rate_ftn(pc, 1.0, 0.3, 2.0);
    const double r_nyq = rate_nyquist(pc, 1.0, 0.3, 2.0);
    const double r_rel = std::abs(r_spec - r_nyq) / r_nyq;
    if (r_rel > 1e-9) c.fail("rate off by rel " + g3(r_rel));

    return {"nyquist degeneration at tau=1", c.pass,
            c.join("max deviations: gram " + g3(gdev) + ", p_max rel " + g3(p_rel))};
}

// The spectral KL against a from-scratch dense Gaussian relative entropy:
//   D = tr(S0^-1 S1) - n - log det(S0^-1 S1),
// S0 = sigma_w^2 G, S1 = h^2 sigma_a^2 G G^T + sigma_w^2 G.
inline CheckResult criterion_kl_oracle() {
    using detail::g3;
    detail::Collector c;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        RngStream r(derive_seed(0xACCE97, static_cast<std::uint64_t>(k)));
        const int n = 1 + static_cast<int>(r.uniform() * 8.0);
        PulseConfig pc;
        pc.alpha = 0.1 + 0.4 * r.uniform();
        pc.tau = 0.5 + 0.5 * r.uniform();
        LinkState link;
        link.h_aw_sq = 0.5 + r.uniform();
        link.sigma_w_sq = 0.5 + r.uniform();
        link.n0 = 2.0 * link.sigma_w_sq;
        link.sigma_a_sq = std::exp(std::log(1e-3) * r.uniform());  // (1e-3, 1]

        const IsiMatrix gm = build_isi_matrix(n, pc);
        const EigenSpectrum spec = eigen_spectrum(gm);
        const double d = kl_divergence(link, spec);

        const Eigen::MatrixXd g = gm.entries;
        const Eigen::MatrixXd s0 = link.sigma_w_sq * g;
        const Eigen::MatrixXd s1 =
            link.h_aw_sq * link.sigma_a_sq * g * g.transpose() + s0;
        const Eigen::MatrixXd m = s0.llt().solve(s1);
        const double d_ref = m.trace() - n - std::log(m.partialPivLu().determinant());

        const double rel = std::abs(d - d_ref) / std::abs(d_ref);
        worst = std::max(worst, rel);
        if (rel > 1e-8)
            c.fail("case " + std::to_string(k) + ": rel " + g3(rel));
    }
    return {"spectral KL matches the dense-matrix oracle", c.pass,
            c.join("worst rel " + g3(worst) + " over 100 cases")};
}

// Error probabilities: exponential closed form at n=1, then the CF inversion
// against Monte Carlo at n=64. Seeds are pinned; with ~200 3-sigma
// comparisons a clean run is expected but not certain, so a trip under a
// fresh seed is a seed-selection event, not a tolerance change.
inline CheckResult criterion_detector_distribution() {
    using detail::g3;
    detail::Collector c;
    double worst_closed = 0.0, worst_z = 0.0;

    for (double x : {0.05, 0.4, 2.0}) {
        LinkState link;
        link.n0 = 2.0;
        link.sigma_a_sq = x;  // rho = 1, lambda = 1
        EigenSpectrum spec = nyquist_spectrum(1, PulseConfig{0.3, 1.0, 1.0});
        const DetectorModel det = build_detector(link, spec);
        const CfErrorProbs cf = error_probs_cf(det);
        const double pfa_ref = std::exp(-det.theta / (2.0 * det.alphas[0]));
        const double pmd_ref = 1.0 - std::exp(-det.theta / (2.0 * det.gammas[0]));
        const double e1 = std::abs(cf.p_fa - pfa_ref);
        const double e2 = std::abs(cf.p_md - pmd_ref);
        worst_closed = std::max({worst_closed, e1, e2});
        if (e1 > 1e-8 || e2 > 1e-8)
            c.fail("n=1 x=" + g3(x) + ": CF off closed form by " + g3(std::max(e1, e2)));
        const std::uint64_t trials = 1000000;
        const McErrorProbs mc = error_probs_mc(det, trials, 977);
        for (auto [hat, ref] : {std::pair{mc.p_fa, pfa_ref}, std::pair{mc.p_md, pmd_ref}}) {
            const double sig = std::sqrt(ref * (1.0 - ref) / static_cast<double>(trials));
            const double slack = 3.0 * sig + 2.0 / static_cast<double>(trials);
            worst_z = std::max(worst_z, std::abs(hat - ref) / std::max(slack / 3.0, 1e-300));
            if (std::abs(hat - ref) > slack)
                c.fail("n=1 x=" + g3(x) + ": MC " + g3(hat) + " vs " + g3(ref));
        }
    }

    const std::uint64_t trials = 400000;
    for (int k = 0; k < 50; ++k) {
        RngStream r(derive_seed(0xD15C0, static_cast<std::uint64_t>(k)));
        PulseConfig pc;
        pc.alpha = 0.1 + 0.4 * r.uniform();
        pc.tau = 0.5 + 0.5 * r.uniform();
        LinkState link;
        link.n0 = 2.0;
        link.sigma_a_sq = std::exp(std::log(2e-3) * r.uniform()) * 0.5;
        const EigenSpectrum spec = asymptotic_eigenvalues(64, pc);
        const DetectorModel det = build_detector(link, spec);
        const CfErrorProbs cf = error_probs_cf(det);
        const McErrorProbs mc = error_probs_mc(det, trials, derive_seed(977, k));
        for (auto [hat, ref, tag] : {std::tuple{mc.p_fa, cf.p_fa, "fa"},
                                     std::tuple{mc.p_md, cf.p_md, "md"}}) {
            const double sig = std::sqrt(ref * (1.0 - ref) / static_cast<double>(trials));
            const double slack = 3.0 * sig + 2.0 / static_cast<double>(trials);
            worst_z = std::max(worst_z, std::abs(hat - ref) / std::max(slack / 3.0, 1e-300));
            if (std::abs(hat - ref) > slack)
                c.fail("case " + std::to_string(k) + " p_" + tag + ": " + g3(hat)
                       + " vs CF " + g3(ref));
        }
    }
    return {"detector error probabilities (closed form, CF vs MC)", c.pass,
            c.join("worst closed-form err " + g3(worst_closed) + ", worst MC z "
                   + g3(worst_z))};
}

// Total variation never beats sqrt(D/2); checked on the estimated error sum
// with its own Monte Carlo slack.
inline CheckResult criterion_pinsker() {
    using detail::g3;
    detail::Collector c;
    double worst = -1e300;
    const std::uint64_t trials = 100000;
    for (int k = 0; k < 50; ++k) {
        RngStream r(derive_seed(0x9145, static_cast<std::uint64_t>(k)));
        const int n = 1 + static_cast<int>(r.uniform() * 64.0);
        PulseConfig pc;
        pc.alpha = 0.1 + 0.4 * r.uniform();
        pc.tau = 0.5 + 0.5 * r.uniform();
        LinkState link;
        link.h_aw_sq = 0.5 + r.uniform();
        link.sigma_w_sq = 0.5 + r.uniform();
        link.n0 = 2.0 * link.sigma_w_sq;
        link.sigma_a_sq = std::exp(std::log(1e-3) * r.uniform());
        const EigenSpectrum spec = asymptotic_eigenvalues(std::max(1, n), pc);
        const double d = kl_divergence(link, spec);
        const DetectorModel det = build_detector(link, spec);
        const McErrorProbs mc = error_probs_mc(det, trials, derive_seed(4242, k));
        const double tv_hat = 1.0 - (mc.p_fa + mc.p_md);
        const double ci = 3.0 * std::sqrt((mc.p_fa * (1.0 - mc.p_fa)
                                           + mc.p_md * (1.0 - mc.p_md))
                                          / static_cast<double>(trials));
        const double gap = tv_hat - std::sqrt(0.5 * d) - ci;
        worst = std::max(worst, gap);
        if (gap > 0.0)
            c.fail("case " + std::to_string(k) + ": 1-(pfa+pmd)=" + g3(tv_hat)
                   + " exceeds sqrt(D/2)=" + g3(std::sqrt(0.5 * d)));
    }
    return {"Pinsker bound on the detector's advantage", c.pass,
            c.join("worst slack " + g3(-worst))};
}

// Accelerating from tau=1 raises the admissible power, the gain saturates for
// tau <= 1/(1+alpha), and the extra power survives as extra rate. Exact
// finite-block spectra at n' = 500, KL budget eps = 0.01.
inline CheckResult criterion_power_ordering(const std::string& cache_dir) {
    using detail::g3;
    detail::Collector c;
    const double eps = 0.01;
    const int n_prime = 500;
    LinkState base;
    base.n0 = 2.0;
    const PulseConfig pc1{0.3, 1.0, 1.0};
    const double p_nyq = max_power_nyquist(base, pc1, n_prime, {ConstraintKind::kl, eps}).p_max;
    const double r_nyq = rate_nyquist(pc1, 1.0, p_nyq, 2.0);

    std::vector<double> taus;
    for (int i = 10; i <= 20; ++i) taus.push_back(0.05 * i);
    std::vector<double> pf(taus.size());
    double min_ratio = 1e300, flat_lo = 1e300, flat_hi = -1e300, min_rate_gap = 1e300;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const PulseConfig pc{0.3, 1.0, taus[i]};
        const int n = ftn_block_length(n_prime, taus[i]);
        const EigenSpectrum spec = cached_eigen_spectrum(cache_dir, n, pc);
        pf[i] = max_power_kl(base, spec, eps).p_max;
        if (taus[i] < 1.0) {
            min_ratio = std::min(min_ratio, pf[i] / p_nyq);
            if (pf[i] <= p_nyq)
                c.fail("tau=" + g3(taus[i]) + ": P_F=" + g3(pf[i]) + " <= P_N=" + g3(p_nyq));
            const double r = rate_ftn(pc, 1.0, pf[i], 2.0);
            min_rate_gap = std::min(min_rate_gap, r / r_nyq - 1.0);
            if (r <= r_nyq)
                c.fail("tau=" + g3(taus[i]) + ": rate " + g3(r) + " <= Nyquist " + g3(r_nyq));
        }
        if (taus[i] <= 1.0 / 1.3 + 1e-12) {
            flat_lo = std::min(flat_lo, pf[i]);
            flat_hi = std::max(flat_hi, pf[i]);
        }
    }
    // block-length rounding makes the curve wiggle at the 1e-4 level, so the
    // monotonicity check carries a 1e-3 relative slack
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (pf[i] > pf[i - 1] * (1.0 + 1e-3))
            c.fail("not non-increasing at tau=" + g3(taus[i]));
    if (flat_hi / flat_lo - 1.0 > 5e-3)
        c.fail("saturated region spread " + g3(flat_hi / flat_lo - 1.0) + " > 0.5%");
    const double p_tau1_rel = std::abs(pf.back() - p_nyq) / p_nyq;
    if (p_tau1_rel > 1e-9)
        c.fail("tau=1 power off Nyquist by rel " + g3(p_tau1_rel));
    return {"power and rate ordering across tau (exact spectra)", c.pass,
            c.join("min P_F/P_N=" + g3(min_ratio) + ", flat spread "
                   + g3(flat_hi / flat_lo - 1.0) + ", min rate gap " + g3(min_rate_gap))};
}

// Square-root law: log P_N against log n' has slope -1/2.
inline CheckResult criterion_sqrt_law() {
    using detail::g3;
    detail::Collector c;
    LinkState base;
    base.n0 = 2.0;
    const PulseConfig pc{0.3, 1.0, 1.0};
    std::vector<double> xs, ys;
    for (int np = 1000; np <= 10000; np += 1000) {
        const double p = max_power_nyquist(base, pc, np, {ConstraintKind::kl, 0.01}).p_max;
        xs.push_back(std::log(static_cast<double>(np)));
        ys.push_back(std::log(p));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = num / den;
    if (std::abs(slope + 0.5) > 0.05)
        c.fail("slope " + g3(slope) + " not within 0.05 of -0.5");
    return {"square-root law of the admissible power", c.pass,
            c.join("slope " + g3(slope))};
}

// Same seed, same bytes: the runner is rerun at library level and compared as
// serialized output, Monte Carlo columns included.
inline CheckResult criterion_determinism() {
    detail::Collector c;
    const auto render = [](Figure fig, const ExperimentConfig& cfg) {
        const auto rows = run_figure(fig, cfg);
        std::ostringstream os;
        write_rows(os, cfg, rows);
        return os.str();
    };
    {
        ExperimentConfig cfg;
        cfg.taus = {0.8};
        cfg.n_primes = {64};
        cfg.constraints = {"kl"};
        cfg.seed = 7;
        if (render(Figure::fig3, cfg) != render(Figure::fig3, cfg))
            c.fail("deterministic path differs across reruns");
    }
    {
        ExperimentConfig cfg;
        cfg.taus = {0.8};
        cfg.n_primes = {50};
        cfg.constraints = {"bayes"};
        cfg.trials = 2000;
        cfg.seed = 7;
        cfg.workers = 2;  // scheduling must not leak into the output
        if (render(Figure::fig2, cfg) != render(Figure::fig2, cfg))
            c.fail("Monte Carlo path differs across reruns");
    }
    return {"byte-identical reruns under a fixed seed", c.pass, c.join("two reruns compared")};
}

}

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "common.hpp"
#include "covertness.hpp"
#include "power.hpp"
#include "pulse.hpp"
#include "quadrature.hpp"

namespace ftn {

enum class FadingModel { awgn, rayleigh_block };

// Achievable rate of the accelerated scheme in bits/s, spectral form:
//   R = 2 Int_0^{1/(2 tau T)} log2(1 + 2 |h_ab|^2 P H_fo(f) / N0) df.
// At tau = 1 the folded spectrum is flat and this collapses to the orthogonal
// closed form below.
inline double rate_ftn(const PulseConfig& cfg, double h_ab_sq, double p, double n0) {
    cfg.validate();
    if (!(h_ab_sq >= 0.0) || !(p >= 0.0) || !(n0 > 0.0))
        throw std::invalid_argument("rate: bad argument");
    if (h_ab_sq * p == 0.0) return 0.0;
    const double half = 0.5 * cfg.fold_period();
    const double c = 2.0 * h_ab_sq * p / n0;
    const auto f = [&](double fr) { return std::log2(1.0 + c * folded_spectrum(fr, cfg)); };
    std::vector<double> brk;
    for (double b : detail::folded_breakpoints(cfg))
        if (b < half) brk.push_back(b);
    return 2.0 * integrate_segmented(f, 0.0, half, brk, 4097, 1e-8, 1e-14).value;
}

inline double rate_nyquist(const PulseConfig& cfg, double h_ab_sq, double p, double n0) {
    cfg.validate();
    if (!(h_ab_sq >= 0.0) || !(p >= 0.0) || !(n0 > 0.0))
        throw std::invalid_argument("rate: bad argument");
    return std::log2(1.0 + 2.0 * h_ab_sq * p * cfg.T / n0) / cfg.T;
}

enum class RateOutcome { ok, unbounded_power };

struct RateResult {
    RateOutcome outcome = RateOutcome::ok;
    double bits_per_sec = 0.0;
    PowerSolution power;
};

// Covert rate for one channel realization: solve the constraint for p_max on
// the given spectrum, then evaluate the rate there.
inline RateResult instantaneous_covert_rate(const LinkState& base, const EigenSpectrum& spec,
                                            const CovertnessConstraint& c,
                                            const PowerSolveOptions& opt = {}) {
    RateResult r;
    r.power = (c.kind == ConstraintKind::kl)
        ? max_power_kl(base, spec, c.epsilon)
        : max_power_bayesian(base, spec, c.epsilon, opt);
    if (r.power.outcome == PowerOutcome::unbounded) {
        r.outcome = RateOutcome::unbounded_power;
        r.bits_per_sec = std::numeric_limits<double>::infinity();
        return r;
    }
    r.bits_per_sec = rate_ftn(spec.cfg, base.h_ab_sq, r.power.p_max, base.n0);
    return r;
}

// Rayleigh block-fading covert rate: p_max solved under the empirical-mean
// constraint over the warden draws, rate averaged over the receiver draws.
// Both draw sets are addressed by (seed, tag, index), so two schemes solved
// with the same seed see identical channels.
inline RateResult ergodic_covert_rate(const LinkState& base, const EigenSpectrum& spec,
                                      const CovertnessConstraint& c,
                                      const ErgodicOptions& opt = {}) {
    RateResult r;
    r.power = (c.kind == ConstraintKind::kl)
        ? ergodic_max_power_kl(base, spec, c.epsilon, opt)
        : ergodic_max_power_bayesian(base, spec, c.epsilon, opt);
    if (r.power.outcome == PowerOutcome::unbounded) {
        r.outcome = RateOutcome::unbounded_power;
        r.bits_per_sec = std::numeric_limits<double>::infinity();
        return r;
    }
    const std::vector<double> g = fading_gains(opt.seed, fading_tag_receiver, opt.draws);
    double mean = 0.0;
    for (double gk : g)
        mean += rate_ftn(spec.cfg, base.h_ab_sq * gk, r.power.p_max, base.n0);
    r.bits_per_sec = mean / static_cast<double>(g.size());
    return r;
}

}

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "common.hpp"
#include "detection.hpp"
#include "isi.hpp"
#include "pulse.hpp"
#include "quadrature.hpp"

namespace ftn {

// D(P0 || P1) for the detector's Gaussian pair, in nats:
//   D = sum_n [ x_n - log(1 + x_n) ],  x_n = rho sigma_a^2 lambda_n.
// The series branch of x_minus_log1p keeps each term accurate deep in the
// covert regime where x_n ~ 1e-4 and the naive difference cancels.
inline double kl_divergence(const LinkState& link, const EigenSpectrum& spec) {
    link.validate();
    const double c = link.rho() * link.sigma_a_sq;
    double d = 0.0;
    for (double lam : spec.values) {
        if (lam < 0.0) throw std::invalid_argument("covertness: negative eigenvalue");
        d += x_minus_log1p(c * lam);
    }
    return d;
}

struct KlBudget {
    double epsilon = 0.01;
    double bound() const { return 2.0 * epsilon * epsilon; }
};

enum class XiMethod { cf, mc };

struct BayesOptions {
    XiMethod method = XiMethod::cf;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    CfOptions cf{};
};

struct XiEstimate {
    double xi = 0.0;  // p_fa + p_md at the optimal threshold, equal priors
    double ci = 0.0;  // 1.96-sigma half width; 0 for the CF route
};

// Willie's minimal total error xi = p_fa + p_md. Covert means xi >= 1 - eps.
inline XiEstimate bayesian_total_error(const DetectorModel& det, const BayesOptions& opt = {}) {
    XiEstimate e;
    if (opt.method == XiMethod::cf) {
        const CfErrorProbs p = error_probs_cf(det, opt.cf);
        e.xi = p.p_fa + p.p_md;
        e.ci = 0.0;
    } else {
        const McErrorProbs p = error_probs_mc(det, opt.trials, opt.seed);
        e.xi = p.p_fa + p.p_md;
        // Var(p_fa) + Var(p_md), the two counts being independent streams
        const double v = (p.p_fa * (1.0 - p.p_fa) + p.p_md * (1.0 - p.p_md))
                       / static_cast<double>(opt.trials);
        e.ci = 1.96 * std::sqrt(v);
    }
    return e;
}

enum class ConstraintKind { kl, bayesian };

struct CovertnessConstraint {
    ConstraintKind kind = ConstraintKind::kl;
    double epsilon = 0.01;
};

struct ConstraintCheck {
    bool ok = false;
    double margin = 0.0;  // slack toward the constraint; >= 0 iff satisfied
    double ci = 0.0;
};

inline ConstraintCheck satisfied(const CovertnessConstraint& c, const LinkState& link,
                                 const EigenSpectrum& spec, const BayesOptions& opt = {}) {
    if (!(c.epsilon >= 0.0) || !(c.epsilon <= 1.0))
        throw std::invalid_argument("covertness: epsilon must lie in [0, 1]");
    ConstraintCheck out;
    if (c.kind == ConstraintKind::kl) {
        const double d = kl_divergence(link, spec);
        out.margin = KlBudget{c.epsilon}.bound() - d;
        out.ci = 0.0;
        out.ok = out.margin >= 0.0;
    } else {
        const DetectorModel det = build_detector(link, spec);
        const XiEstimate e = bayesian_total_error(det, opt);
        out.margin = e.xi - (1.0 - c.epsilon);
        out.ci = e.ci;
        out.ok = out.margin >= 0.0;
    }
    return out;
}

namespace detail {

// Kink locations of the folded spectrum inside [0, 1/(tau T))
inline std::vector<double> folded_breakpoints(const PulseConfig& cfg) {
    const double period = cfg.fold_period();
    const double lo = (1.0 - cfg.alpha) / (2.0 * cfg.T);
    const double hi = (1.0 + cfg.alpha) / (2.0 * cfg.T);
    const int kmax = static_cast<int>(std::ceil((1.0 + cfg.alpha) * cfg.tau)) + 1;
    std::vector<double> pts;
    for (int k = -kmax; k <= kmax; ++k) {
        for (double c : {lo, hi}) {
            for (double s : {1.0, -1.0}) {
                const double b = static_cast<double>(k) * period + s * c;
                if (b > 0.0 && b < period) pts.push_back(b);
            }
        }
    }
    return pts;
}

}  // namespace detail

// Per-second relative entropy rate of the stationary limit:
//   Delta_ftn = rho P - Int_0^{1/(tau T)} log(1 + rho P H_fo(f)) df.
// The linear term integrates exactly because Int H_fo over one period is 1.
inline double delta_ftn(const PulseConfig& cfg, double rho, double p) {
    cfg.validate();
    if (!(rho >= 0.0) || !(p >= 0.0))
        throw std::invalid_argument("covertness: rho and p must be >= 0");
    if (rho * p == 0.0) return 0.0;
    const double period = cfg.fold_period();
    const auto f = [&](double fr) { return std::log1p(rho * p * folded_spectrum(fr, cfg)); };
    const double integral = integrate_segmented(f, 0.0, period, detail::folded_breakpoints(cfg),
                                                4097, 1e-10, 1e-14).value;
    return rho * p - integral;
}

// Nyquist counterpart with i.i.d. symbols of energy P T:
//   Delta_nyquist = [x - log(1 + x)] / T,  x = rho P T.
inline double delta_nyquist(const PulseConfig& cfg, double rho, double p) {
    cfg.validate();
    if (!(rho >= 0.0) || !(p >= 0.0))
        throw std::invalid_argument("covertness: rho and p must be >= 0");
    return x_minus_log1p(rho * p * cfg.T) / cfg.T;
}

}

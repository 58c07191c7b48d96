#pragma once

#include <cmath>
#include <stdexcept>

#include "common.hpp"

namespace ftn {

// Root-raised-cosine shaping with unit energy; tau = 1 is Nyquist signaling.
struct PulseConfig {
    double alpha = 0.3;  // roll-off, in [0,1]
    double T = 1.0;      // orthogonal interval, seconds
    double tau = 1.0;    // acceleration factor, in (0,1]

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw std::invalid_argument("pulse: alpha must be in [0,1]");
        if (!(T > 0.0))
            throw std::invalid_argument("pulse: T must be positive");
        if (!(tau > 0.0 && tau <= 1.0))
            throw std::invalid_argument("pulse: tau must be in (0,1]");
    }

    double symbol_interval() const { return tau * T; }
    double fold_period() const { return 1.0 / (tau * T); }
};

// Matched-filter autocorrelation g(t) = sinc(t/T) cos(pi a t/T) / (1-(2at/T)^2),
// the raised-cosine pulse of a unit-energy RRC filter. Total function: the
// removable singularity at |2at/T| = 1 is replaced by its analytic limit
// (pi/4) sinc(1/(2a)) inside a 1e-8 relative window to dodge cancellation.
inline double rc_autocorrelation(double t, const PulseConfig& cfg) {
    const double u = t / cfg.T;
    if (cfg.alpha > 0.0) {
        const double w = 2.0 * cfg.alpha * std::abs(u);
        if (std::abs(w - 1.0) < 1e-8)
            return (pi / 4.0) * sinc(1.0 / (2.0 * cfg.alpha));
    }
    const double au = 2.0 * cfg.alpha * u;
    return sinc(u) * std::cos(pi * cfg.alpha * u) / (1.0 - au * au);
}

// |H(f)|^2, the raised-cosine energy spectrum of the unit-energy RRC filter:
// T inside the flat band, cosine taper on the transition band, 0 outside.
// alpha = 0 collapses the taper to a brick wall at |f| = 1/(2T).
inline double rrc_energy_spectrum(double f, const PulseConfig& cfg) {
    const double af = std::abs(f);
    const double lo = (1.0 - cfg.alpha) / (2.0 * cfg.T);
    const double hi = (1.0 + cfg.alpha) / (2.0 * cfg.T);
    if (af <= lo) return cfg.T;
    if (af >= hi) return 0.0;
    return 0.5 * cfg.T * (1.0 + std::cos(pi * cfg.T / cfg.alpha * (af - lo)));
}

// Folded spectrum H_fo(f) = sum_k |H(f - k/(tau T))|^2, period 1/(tau T).
// Compact support makes the truncated sum exact: replicas with
// |k| > ceil((1+alpha) tau) + 1 cannot reach the reduced frequency.
inline double folded_spectrum(double f, const PulseConfig& cfg) {
    const double period = cfg.fold_period();
    const double fr = std::remainder(f, period);  // in [-period/2, period/2]
    const int kmax = static_cast<int>(std::ceil((1.0 + cfg.alpha) * cfg.tau)) + 1;
    double sum = 0.0;
    for (int k = -kmax; k <= kmax; ++k)
        sum += rrc_energy_spectrum(fr - k * period, cfg);
    return sum;
}

}

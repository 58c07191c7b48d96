// Sweeps the acceleration factor at a fixed block length and prints the
// admissible covert power against the orthogonal baseline, plus the rate
// bought with it. The gain saturates once tau <= 1/(1+alpha).
#include <cstdio>

#include "ftncovert/ftncovert.hpp"

int main(int argc, char** argv) {
    const char* cache_dir = argc > 1 ? argv[1] : "";
    const int n_prime = 500;
    const double eps = 0.01;

    ftn::LinkState base;
    base.n0 = 2.0;

    const ftn::PulseConfig nyq{0.3, 1.0, 1.0};
    const double p_n = ftn::max_power_nyquist(base, nyq, n_prime,
                                              {ftn::ConstraintKind::kl, eps}).p_max;
    const double r_n = ftn::rate_nyquist(nyq, 1.0, p_n, base.n0);
    std::printf("orthogonal baseline: n' = %d, eps = %.2f\n", n_prime, eps);
    std::printf("  P_N = %.6e W   R_N = %.6e bit/s\n\n", p_n, r_n);
    std::printf("  tau     n     P_F [W]      P_F/P_N   R_F [bit/s]  R_F/R_N\n");

    for (int i = 10; i <= 20; ++i) {
        const double tau = 0.05 * i;
        ftn::PulseConfig pc{0.3, 1.0, tau};
        const int n = ftn::ftn_block_length(n_prime, tau);
        const ftn::EigenSpectrum spec = ftn::cached_eigen_spectrum(cache_dir, n, pc);
        const ftn::PowerSolution sol = ftn::max_power_kl(base, spec, eps);
        const double r = ftn::rate_ftn(pc, 1.0, sol.p_max, base.n0);
        std::printf("  %.2f  %4d   %.6e   %.4f   %.6e   %.4f\n",
                    tau, n, sol.p_max, sol.p_max / p_n, r, r / r_n);
    }
    std::printf("\n(pass a cache directory as argv[1] to skip repeated eigensolves)\n");
    return 0;
}

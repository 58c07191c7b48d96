#include <catch_amalgamated.hpp>
#include <cmath>

#include "ftncovert/ftncovert.hpp"
#include "test_util.hpp"

using namespace ftn;

TEST_CASE("spectral KL equals the dense Gaussian relative entropy", "[covertness]") {
    for (int k = 0; k < 30; ++k) {
        RngStream r(derive_seed(31337, static_cast<std::uint64_t>(k)));
        const int n = 2 + static_cast<int>(r.uniform() * 7.0);
        PulseConfig pc;
        pc.alpha = 0.1 + 0.4 * r.uniform();
        pc.tau = 0.5 + 0.5 * r.uniform();
        LinkState link;
        link.h_aw_sq = 0.5 + r.uniform();
        link.sigma_w_sq = 0.5 + r.uniform();
        link.n0 = 2.0 * link.sigma_w_sq;
        link.sigma_a_sq = std::exp(std::log(1e-3) * r.uniform());

        const IsiMatrix g = build_isi_matrix(n, pc);
        const double d = kl_divergence(link, eigen_spectrum(g));
        const double ref = oracle::dense_kl(g, link);
        CHECK(d == Catch::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("x - log1p(x) survives catastrophic cancellation", "[covertness]") {
    for (double x : {1e-8, 1e-6, 1e-4, 0.049, 0.05, 0.3, 2.0}) {
        const double ref = x < 0.2 ? oracle::xml1p_series_ref(x)
                                   : x - std::log1p(x);
        CHECK(x_minus_log1p(x) == Catch::Approx(ref).epsilon(1e-12));
    }
    // continuity across the branch switch
    CHECK(x_minus_log1p(0.05 * (1.0 + 1e-12))
          == Catch::Approx(x_minus_log1p(0.05 * (1.0 - 1e-12))).epsilon(1e-10));
    CHECK(x_minus_log1p(0.0) == 0.0);
}

TEST_CASE("KL scales cleanly with the block under orthogonal signaling", "[covertness]") {
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 0.01;
    const PulseConfig pc{0.3, 1.0, 1.0};
    const double d1 = kl_divergence(link, nyquist_spectrum(100, pc));
    const double d2 = kl_divergence(link, nyquist_spectrum(300, pc));
    CHECK(d2 == Catch::Approx(3.0 * d1).epsilon(1e-12));
    CHECK(d1 == Catch::Approx(100.0 * x_minus_log1p(0.01)).epsilon(1e-12));
}

TEST_CASE("total-error estimate: CF route vs Monte Carlo route", "[covertness]") {
    PulseConfig pc;
    pc.alpha = 0.3;
    pc.tau = 0.8;
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 0.015;
    const EigenSpectrum spec = asymptotic_eigenvalues(48, pc);
    const DetectorModel det = build_detector(link, spec);

    BayesOptions cf;
    cf.method = XiMethod::cf;
    const XiEstimate a = bayesian_total_error(det, cf);
    CHECK(a.ci == 0.0);
    CHECK(a.xi > 0.0);
    CHECK(a.xi <= 1.0 + 1e-12);

    BayesOptions mc;
    mc.method = XiMethod::mc;
    mc.trials = 200000;
    mc.seed = 909;
    const XiEstimate b = bayesian_total_error(det, mc);
    CHECK(b.ci > 0.0);
    CHECK(std::abs(a.xi - b.xi) < 2.0 * b.ci);
}

TEST_CASE("constraint checks report margins with the right sign", "[covertness]") {
    PulseConfig pc;
    pc.alpha = 0.3;
    pc.tau = 0.8;
    const EigenSpectrum spec = asymptotic_eigenvalues(64, pc);
    LinkState link;
    link.n0 = 2.0;

    const double eps = 0.01;
    // far below the budget: satisfied with positive margin
    const auto ok = satisfied({ConstraintKind::kl, eps}, link.with_power(1e-5, pc), spec);
    CHECK(ok.ok);
    CHECK(ok.margin > 0.0);
    // far above: violated
    const auto bad = satisfied({ConstraintKind::kl, eps}, link.with_power(0.3, pc), spec);
    CHECK_FALSE(bad.ok);
    CHECK(bad.margin < 0.0);

    BayesOptions bo;
    bo.method = XiMethod::cf;
    const auto bok = satisfied({ConstraintKind::bayesian, eps}, link.with_power(1e-5, pc), spec, bo);
    CHECK(bok.ok);
    const auto bbad = satisfied({ConstraintKind::bayesian, eps}, link.with_power(0.3, pc), spec, bo);
    CHECK_FALSE(bbad.ok);

    CHECK_THROWS_AS(satisfied({ConstraintKind::kl, 1.5}, link, spec), std::invalid_argument);
}

TEST_CASE("per-second divergence rates: flat case and ordering", "[covertness]") {
    const double rho = 1.0, p = 1e-3;
    // tau = 1: the folded spectrum is flat and both expressions coincide
    PulseConfig nyq{0.3, 1.0, 1.0};
    CHECK(delta_ftn(nyq, rho, p) == Catch::Approx(delta_nyquist(nyq, rho, p)).epsilon(1e-9));

    // acceleration spreads the same power over a wider band and hides better
    PulseConfig acc{0.3, 1.0, 0.8};
    CHECK(delta_ftn(acc, rho, p) < delta_nyquist(acc, rho, p));
    CHECK(delta_ftn(acc, rho, 0.0) == 0.0);
    CHECK(delta_ftn(acc, 0.0, p) == 0.0);
}

TEST_CASE("finite-block KL approaches the per-second rate", "[covertness]") {
    PulseConfig pc;
    pc.alpha = 0.3;
    pc.tau = 0.8;
    LinkState link;
    link.n0 = 2.0;
    const double p = 2e-3;
    const int n = 4096;
    const double d = kl_divergence(link.with_power(p, pc), asymptotic_eigenvalues(n, pc));
    const double per_sec = d / (n * pc.symbol_interval());
    const double limit = delta_ftn(pc, link.rho(), p);
    CHECK(per_sec == Catch::Approx(limit).epsilon(0.05));
}

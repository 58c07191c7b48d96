#include <catch_amalgamated.hpp>
#include <cmath>

#include "ftncovert/ftncovert.hpp"
#include "test_util.hpp"

using namespace ftn;

namespace {

EigenSpectrum fixed_spectrum(std::vector<double> values, double tau = 1.0) {
    EigenSpectrum s;
    s.kind = SpectrumKind::exact;
    s.cfg = PulseConfig{0.3, 1.0, tau};
    s.values = std::move(values);
    return s;
}

}  // namespace

TEST_CASE("detector weights and threshold", "[detection]") {
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 0.2;
    const EigenSpectrum spec = fixed_spectrum({2.0, 1.0, 0.5});
    const DetectorModel det = build_detector(link, spec);

    REQUIRE(det.n() == 3);
    double theta = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double x = 0.2 * spec.values[static_cast<std::size_t>(i)];
        CHECK(det.alphas[static_cast<std::size_t>(i)] == Catch::Approx(0.5 * x / (1.0 + x)).epsilon(1e-15));
        CHECK(det.gammas[static_cast<std::size_t>(i)] == Catch::Approx(0.5 * x).epsilon(1e-15));
        // the H1 weight is the H0 weight inflated by the H1 variance ratio
        CHECK(det.gammas[static_cast<std::size_t>(i)]
              == Catch::Approx(det.alphas[static_cast<std::size_t>(i)] * (1.0 + x)).epsilon(1e-14));
        CHECK(det.alphas[static_cast<std::size_t>(i)] < det.gammas[static_cast<std::size_t>(i)]);
        theta += std::log1p(x);
    }
    CHECK(det.theta == Catch::Approx(theta).epsilon(1e-15));
    CHECK(det.log_beta1 == -det.theta);

    CHECK_THROWS_AS(build_detector(link, fixed_spectrum({1.0, -0.1})), std::invalid_argument);
}

TEST_CASE("single-observation error probabilities in closed form", "[detection]") {
    for (double x : {0.02, 0.5, 3.0}) {
        LinkState link;
        link.n0 = 2.0;
        link.sigma_a_sq = x;
        const DetectorModel det = build_detector(link, fixed_spectrum({1.0}));
        const CfErrorProbs p = error_probs_cf(det);
        CHECK(p.p_fa == Catch::Approx(std::exp(-det.theta / (2.0 * det.alphas[0]))).margin(1e-10));
        CHECK(p.p_md == Catch::Approx(1.0 - std::exp(-det.theta / (2.0 * det.gammas[0]))).margin(1e-10));
    }
}

TEST_CASE("CF inversion against the hypoexponential closed form", "[detection]") {
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 0.8;
    const EigenSpectrum spec = fixed_spectrum({1.9, 1.0, 0.35});
    const DetectorModel det = build_detector(link, spec);
    const CfErrorProbs p = error_probs_cf(det);
    CHECK(p.p_fa == Catch::Approx(oracle::hypoexp_tail(det.alphas, det.theta)).margin(1e-8));
    CHECK(p.p_md == Catch::Approx(1.0 - oracle::hypoexp_tail(det.gammas, det.theta)).margin(1e-8));
}

TEST_CASE("CF inversion against the Erlang closed form", "[detection]") {
    // sixteen equal eigenvalues collapse to a single weight group
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 0.15;
    const EigenSpectrum spec = nyquist_spectrum(16, PulseConfig{0.3, 1.0, 1.0});
    const DetectorModel det = build_detector(link, spec);
    const CfErrorProbs p = error_probs_cf(det);
    CHECK(p.p_fa == Catch::Approx(oracle::erlang_tail(det.alphas[0], 16, det.theta)).margin(1e-9));
    CHECK(p.p_md == Catch::Approx(1.0 - oracle::erlang_tail(det.gammas[0], 16, det.theta)).margin(1e-9));
}

TEST_CASE("CF inversion deep in the covert regime", "[detection]") {
    // x ~ 1e-4 per mode: theta is tiny and both probabilities sit near 1/2
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 1e-4;
    const EigenSpectrum spec = nyquist_spectrum(1000, PulseConfig{0.3, 1.0, 1.0});
    const DetectorModel det = build_detector(link, spec);
    const CfErrorProbs p = error_probs_cf(det);
    CHECK(p.p_fa == Catch::Approx(oracle::erlang_tail(det.alphas[0], 1000, det.theta)).margin(1e-8));
    CHECK(p.p_md == Catch::Approx(1.0 - oracle::erlang_tail(det.gammas[0], 1000, det.theta)).margin(1e-8));
    CHECK(p.p_fa + p.p_md == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("weight compression changes the answer only marginally", "[detection]") {
    PulseConfig pc;
    pc.alpha = 0.3;
    pc.tau = 0.8;
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 2e-3;
    const EigenSpectrum spec = asymptotic_eigenvalues(200, pc);
    const DetectorModel det = build_detector(link, spec);
    const CfErrorProbs exact = error_probs_cf(det);
    CfOptions o32, o96;
    o32.max_distinct = 32;
    o96.max_distinct = 96;
    const CfErrorProbs c32 = error_probs_cf(det, o32);
    const CfErrorProbs c96 = error_probs_cf(det, o96);
    CHECK(std::abs(c32.p_fa - exact.p_fa) < 1e-3);
    CHECK(std::abs(c32.p_md - exact.p_md) < 1e-3);
    CHECK(std::abs(c96.p_fa - exact.p_fa) < 1e-4);
    CHECK(std::abs(c96.p_md - exact.p_md) < 1e-4);
}

TEST_CASE("statistic routes agree on shared draws", "[detection]") {
    PulseConfig pc;
    pc.alpha = 0.3;
    pc.tau = 0.8;
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 0.3;
    const EigenSpectrum spec = eigen_spectrum(build_isi_matrix(12, pc));
    const DetectorModel det = build_detector(link, spec);
    const double c = link.rho() * link.sigma_a_sq;

    RngStream s1(99), s2(99);
    // route A: build the rotated observation by hand from |v|^2 draws
    ObservationVector obs;
    obs.hypothesis = Hypothesis::H1;
    double manual = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double lam = spec.values[static_cast<std::size_t>(i)];
        const double w = s1.cn_norm_sq2();
        const double var = link.sigma_w_sq * lam * (c * lam + 1.0);
        obs.y.push_back({std::sqrt(0.5 * var * w), 0.0});
        manual += det.gammas[static_cast<std::size_t>(i)] * w;
    }
    const double t_obs = test_statistic(det, link, spec, obs);
    // route B: the direct statistic sampler on an identical stream
    const double t_direct = sample_statistic(det, Hypothesis::H1, s2);
    CHECK(t_obs == Catch::Approx(manual).epsilon(1e-12));
    CHECK(t_direct == Catch::Approx(manual).epsilon(1e-12));
}

TEST_CASE("observation draws have the advertised second moments", "[detection]") {
    // loose distributional check: mean |y_n|^2 over many draws
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 1.0;
    const EigenSpectrum spec = fixed_spectrum({1.6, 0.4});
    RngStream rng(7);
    double m0 = 0.0, m1 = 0.0;
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
        const ObservationVector a = draw_observation(link, spec, Hypothesis::H0, rng);
        const ObservationVector b = draw_observation(link, spec, Hypothesis::H1, rng);
        m0 += std::norm(a.y[0]);
        m1 += std::norm(b.y[0]);
    }
    m0 /= reps;
    m1 /= reps;
    CHECK(m0 == Catch::Approx(1.6).epsilon(0.05));               // sigma_w^2 lambda
    CHECK(m1 == Catch::Approx(1.6 * (1.6 + 1.0)).epsilon(0.05)); // inflated under H1
}

TEST_CASE("Monte Carlo error rates: determinism and CF agreement", "[detection]") {
    PulseConfig pc;
    pc.alpha = 0.3;
    pc.tau = 0.8;
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 0.02;
    const EigenSpectrum spec = asymptotic_eigenvalues(32, pc);
    const DetectorModel det = build_detector(link, spec);

    const std::uint64_t trials = 100000;
    const McErrorProbs a = error_probs_mc(det, trials, 5);
    const McErrorProbs b = error_probs_mc(det, trials, 5);
    CHECK(a.p_fa == b.p_fa);
    CHECK(a.p_md == b.p_md);
    const McErrorProbs c = error_probs_mc(det, trials, 6);
    CHECK((c.p_fa != a.p_fa || c.p_md != a.p_md));

    const CfErrorProbs cf = error_probs_cf(det);
    const double sig_fa = std::sqrt(cf.p_fa * (1.0 - cf.p_fa) / trials);
    const double sig_md = std::sqrt(cf.p_md * (1.0 - cf.p_md) / trials);
    CHECK(std::abs(a.p_fa - cf.p_fa) < 3.5 * sig_fa);
    CHECK(std::abs(a.p_md - cf.p_md) < 3.5 * sig_md);
    CHECK(a.ci_halfwidth > 0.0);
}

TEST_CASE("silent transmitter degenerates to the all-accept detector", "[detection]") {
    LinkState link;
    link.n0 = 2.0;
    link.sigma_a_sq = 0.0;
    const DetectorModel det = build_detector(link, fixed_spectrum({1.3, 0.9}));
    CHECK(det.theta == 0.0);
    const CfErrorProbs cf = error_probs_cf(det);
    CHECK(cf.p_fa == 1.0);
    CHECK(cf.p_md == 0.0);
    const McErrorProbs mc = error_probs_mc(det, 1000, 3);
    CHECK(mc.p_fa == 1.0);
    CHECK(mc.p_md == 0.0);
}

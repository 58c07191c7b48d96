#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "isi.hpp"
#include "power.hpp"
#include "rate.hpp"
#include "version.hpp"

namespace ftn {

// One solved operating point. NaN in kl_nats / xi means "not this constraint";
// outcome "error" carries the exception text instead of numbers.
struct ResultRow {
    std::string figure;
    int row = 0;
    std::string scheme;      // ftn | nyquist
    std::string constraint;  // kl | bayes
    std::string fading;      // awgn | rayleigh
    double tau = 1.0;
    double epsilon = 0.0;
    int n_prime = 0;
    int n = 0;
    double p_max = std::numeric_limits<double>::quiet_NaN();
    double rate_bps = std::numeric_limits<double>::quiet_NaN();
    double kl_nats = std::numeric_limits<double>::quiet_NaN();
    double xi = std::numeric_limits<double>::quiet_NaN();
    double ci = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    std::string outcome = "ok";
    std::string error;
};

enum class Figure { fig2, fig3, fig4, sweep };

inline const char* figure_name(Figure f) {
    switch (f) {
        case Figure::fig2: return "fig2";
        case Figure::fig3: return "fig3";
        case Figure::fig4: return "fig4";
        default: return "sweep";
    }
}

// Fills the empty list fields with the figure's own grid. fig2: rate-vs-N'
// trade at tau 0.8; fig3: tau sweep at N' 5000; fig4: the fading rerun of
// fig2 at eps 0.05. sweep: everything as configured, full grids when unset.
inline ExperimentConfig figure_defaults(Figure f, ExperimentConfig cfg) {
    const auto full_tau = [] {
        std::vector<double> t;
        for (int i = 10; i <= 20; ++i) t.push_back(0.05 * i);
        return t;
    };
    const auto full_np = [] {
        std::vector<int> n;
        for (int k = 1000; k <= 10000; k += 1000) n.push_back(k);
        return n;
    };
    if (cfg.taus.empty()) cfg.taus = (f == Figure::fig3 || f == Figure::sweep)
        ? full_tau() : std::vector<double>{0.8};
    if (cfg.n_primes.empty()) cfg.n_primes = (f == Figure::fig3)
        ? std::vector<int>{5000} : full_np();
    if (cfg.epsilons.empty()) cfg.epsilons =
        f == Figure::fig4  ? std::vector<double>{0.05}
        : f == Figure::sweep ? std::vector<double>{0.01, 0.05}
                             : std::vector<double>{0.01};
    if (cfg.constraints.empty()) cfg.constraints = (f == Figure::fig3)
        ? std::vector<std::string>{"kl"} : std::vector<std::string>{"kl", "bayes"};
    cfg.validate();
    return cfg;
}

namespace detail {

inline void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

struct SpecKey {
    double tau;
    int n;
    bool operator<(const SpecKey& o) const {
        return tau < o.tau || (tau == o.tau && n < o.n);
    }
};

}  // namespace detail

inline std::vector<ResultRow> run_figure(Figure fig, const ExperimentConfig& raw) {
    const ExperimentConfig cfg = figure_defaults(fig, raw);
    const bool ergodic = fig == Figure::fig4;
    const std::uint64_t fading_seed = derive_seed(cfg.seed, 0xFAD1A6);

    // spectra first, serially: rows share them read-only, and the disk cache
    // is only ever written from one thread
    std::map<detail::SpecKey, std::shared_ptr<const EigenSpectrum>> spectra;
    for (double tau : cfg.taus) {
        for (int np : cfg.n_primes) {
            const int n = ftn_block_length(np, tau);
            const detail::SpecKey key{tau, n};
            if (spectra.count(key)) continue;
            const PulseConfig pc = cfg.pulse(tau);
            EigenSpectrum s = (cfg.spectrum == SpectrumPath::exact)
                ? cached_eigen_spectrum(cfg.cache_dir, n, pc)
                : asymptotic_eigenvalues(n, pc);
            s.basis.resize(0, 0);  // rows only need the values
            spectra.emplace(key, std::make_shared<const EigenSpectrum>(std::move(s)));
        }
    }

    LinkState base;
    base.h_ab_sq = cfg.h_ab_sq;
    base.h_aw_sq = cfg.h_aw_sq;
    base.sigma_w_sq = cfg.sigma_w_sq;
    base.n0 = cfg.n0;

    struct Work {
        std::string scheme, constraint;
        double tau, eps;
        int np;
        std::uint64_t seed;
    };
    std::vector<Work> work;
    for (std::size_t ci_ = 0; ci_ < cfg.constraints.size(); ++ci_) {
        const auto& c = cfg.constraints[ci_];
        for (std::size_t ei = 0; ei < cfg.epsilons.size(); ++ei) {
            const double eps = cfg.epsilons[ei];
            for (std::size_t ni = 0; ni < cfg.n_primes.size(); ++ni) {
                const int np = cfg.n_primes[ni];
                // probe seed shared across schemes and taus at one (eps, n')
                // so Monte Carlo comparisons ride common random numbers
                const std::uint64_t s = derive_seed(cfg.seed, (static_cast<std::uint64_t>(ei) << 32)
                                                             | static_cast<std::uint64_t>(ni));
                work.push_back({"nyquist", c, 1.0, eps, np, s});
                for (double tau : cfg.taus) work.push_back({"ftn", c, tau, eps, np, s});
            }
        }
    }

    std::vector<ResultRow> rows(work.size());
    detail::parallel_for(static_cast<int>(work.size()), cfg.workers, [&](int i) {
        const Work& w = work[static_cast<std::size_t>(i)];
        ResultRow& r = rows[static_cast<std::size_t>(i)];
        r.figure = figure_name(fig);
        r.row = i;
        r.scheme = w.scheme;
        r.constraint = w.constraint;
        r.fading = ergodic ? "rayleigh" : "awgn";
        r.tau = w.tau;
        r.epsilon = w.eps;
        r.n_prime = w.np;
        try {
            const bool nyq = w.scheme == "nyquist";
            const PulseConfig pc = cfg.pulse(w.tau);
            std::shared_ptr<const EigenSpectrum> spec;
            if (nyq) {
                spec = std::make_shared<const EigenSpectrum>(nyquist_spectrum(w.np, pc));
            } else {
                spec = spectra.at({w.tau, ftn_block_length(w.np, w.tau)});
            }
            r.n = spec->n();
            const CovertnessConstraint c{
                w.constraint == "kl" ? ConstraintKind::kl : ConstraintKind::bayesian, w.eps};
            RateResult rr;
            if (ergodic) {
                ErgodicOptions eo;
                eo.draws = cfg.draws;
                eo.seed = fading_seed;
                eo.curve_max_distinct = cfg.curve_buckets;
                rr = ergodic_covert_rate(base, *spec, c, eo);
            } else {
                PowerSolveOptions po;
                po.trials = cfg.trials;
                po.seed = w.seed;
                rr = instantaneous_covert_rate(base, *spec, c, po);
            }
            r.p_max = rr.power.p_max;
            r.rate_bps = rr.bits_per_sec;
            r.iterations = rr.power.iterations;
            r.ci = rr.power.ci;
            if (w.constraint == "kl") r.kl_nats = rr.power.constraint_value;
            else r.xi = rr.power.constraint_value;
            r.outcome = rr.outcome == RateOutcome::ok ? "ok" : "unbounded";
        } catch (const std::exception& e) {
            r.outcome = "error";
            r.error = e.what();
        }
    });
    return rows;
}

inline std::vector<ResultRow> run_fig2(const ExperimentConfig& cfg) { return run_figure(Figure::fig2, cfg); }
inline std::vector<ResultRow> run_fig3(const ExperimentConfig& cfg) { return run_figure(Figure::fig3, cfg); }
inline std::vector<ResultRow> run_fig4(const ExperimentConfig& cfg) { return run_figure(Figure::fig4, cfg); }
inline std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) { return run_figure(Figure::sweep, cfg); }

inline void write_rows(std::ostream& os, const ExperimentConfig& cfg,
                       const std::vector<ResultRow>& rows) {
    char meta[128];
    std::snprintf(meta, sizeof meta, "# ftn-covert v%s seed=%llu config-hash=%016llx",
                  version_string,
                  static_cast<unsigned long long>(cfg.seed),
                  static_cast<unsigned long long>(config_hash(cfg)));
    os << meta << '\n';
    csv_line(os, {"figure", "row", "scheme", "constraint", "fading", "tau", "eps", "n_prime",
                  "n", "p_max_w", "rate_bps", "kl_nats", "xi", "ci", "iterations", "outcome",
                  "error"});
    for (const auto& r : rows)
        csv_line(os, {r.figure, std::to_string(r.row), r.scheme, r.constraint, r.fading,
                      csv_num(r.tau), csv_num(r.epsilon), std::to_string(r.n_prime),
                      std::to_string(r.n), csv_num(r.p_max), csv_num(r.rate_bps),
                      csv_num(r.kl_nats), csv_num(r.xi), csv_num(r.ci),
                      std::to_string(r.iterations), r.outcome, r.error});
}

}

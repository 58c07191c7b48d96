#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "acceptance_checks.hpp"
#include "ftncovert/ftncovert.hpp"

namespace {

struct Common {
    std::string config, alpha, big_t, tau, eps, n_prime, sigma_w_sq, n0, h_aw_sq, h_ab_sq,
        trials, draws, seed, spectrum, constraint, curve_buckets, workers, cache_dir, out;
    std::vector<std::string> sets;
    bool allow_noise_mismatch = false;
    bool strict = false;
};

void add_common(CLI::App* c, Common& o) {
    c->add_option("--config", o.config, "file of key=value lines");
    c->add_option("--alpha", o.alpha, "pulse roll-off");
    c->add_option("--T", o.big_t, "orthogonal symbol interval, seconds");
    c->add_option("--tau", o.tau, "acceleration factors, comma list or lo:hi:step");
    c->add_option("--eps", o.eps, "covertness budgets");
    c->add_option("--n-prime", o.n_prime, "pre-acceleration block lengths");
    c->add_option("--sigma-w-sq", o.sigma_w_sq, "warden noise variance per dimension");
    c->add_option("--n0", o.n0, "receiver noise spectral density");
    c->add_option("--h-aw-sq", o.h_aw_sq, "transmitter-to-warden channel gain");
    c->add_option("--h-ab-sq", o.h_ab_sq, "transmitter-to-receiver channel gain");
    c->add_option("--trials", o.trials, "Monte Carlo trials per objective probe");
    c->add_option("--draws", o.draws, "fading draws for ergodic runs");
    c->add_option("--seed", o.seed, "master seed");
    c->add_option("--spectrum", o.spectrum, "eigenvalue path: asymptotic or exact");
    c->add_option("--constraint", o.constraint, "kl, bayes, or both");
    c->add_option("--curve-buckets", o.curve_buckets, "weight buckets for ergodic curves");
    c->add_option("--workers", o.workers, "worker threads, 0 = all cores");
    c->add_option("--cache-dir", o.cache_dir, "eigen-spectrum cache directory");
    c->add_option("--out", o.out, "output CSV path, default stdout");
    c->add_option("--set", o.sets, "extra key=value override, repeatable");
    c->add_flag("--allow-noise-mismatch", o.allow_noise_mismatch,
                "permit sigma_w_sq != n0/2 for what-if runs");
    c->add_flag("--strict", o.strict, "exit nonzero when any row errors");
}

// settings are applied in order: config file, then named flags, then --set
std::vector<std::string> collect_settings(const Common& o) {
    std::vector<std::string> s;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw std::runtime_error("cannot open config file: " + o.config);
        for (std::string line; std::getline(in, line);) s.push_back(line);
    }
    const std::pair<const char*, const std::string*> flags[] = {
        {"alpha", &o.alpha},       {"T", &o.big_t},
        {"tau", &o.tau},           {"eps", &o.eps},
        {"n_prime", &o.n_prime},   {"sigma_w_sq", &o.sigma_w_sq},
        {"n0", &o.n0},             {"h_aw_sq", &o.h_aw_sq},
        {"h_ab_sq", &o.h_ab_sq},   {"trials", &o.trials},
        {"draws", &o.draws},       {"seed", &o.seed},
        {"spectrum", &o.spectrum}, {"constraint", &o.constraint},
        {"curve_buckets", &o.curve_buckets},
        {"workers", &o.workers},   {"cache_dir", &o.cache_dir},
        {"out", &o.out},
    };
    for (const auto& [k, v] : flags)
        if (!v->empty()) s.push_back(std::string(k) + "=" + *v);
    if (o.allow_noise_mismatch) s.push_back("allow_noise_mismatch=1");
    for (const auto& kv : o.sets) s.push_back(kv);
    return s;
}

int run_figure_cmd(ftn::Figure fig, const Common& o) {
    ftn::ExperimentConfig cfg = ftn::parse_config(collect_settings(o));
    cfg.strict = cfg.strict || o.strict;
    // default eigenvalue cache lives alongside the output file
    if (cfg.cache_dir.empty() && !cfg.out.empty()) {
        const auto slash = cfg.out.find_last_of("/\\");
        cfg.cache_dir = (slash == std::string::npos ? std::string(".")
                                                    : cfg.out.substr(0, slash))
                        + "/eig-cache";
    }
    const ftn::ExperimentConfig expanded = ftn::figure_defaults(fig, cfg);
    const auto rows = ftn::run_figure(fig, expanded);

    int errors = 0;
    for (const auto& r : rows)
        if (r.outcome == "error") {
            ++errors;
            std::cerr << "row " << r.row << " failed: " << r.error << "\n";
        }
    if (!expanded.out.empty()) {
        std::ofstream os(expanded.out);
        if (!os) {
            std::cerr << "cannot write " << expanded.out << "\n";
            return 2;
        }
        ftn::write_rows(os, expanded, rows);
    } else {
        ftn::write_rows(std::cout, expanded, rows);
    }
    if (errors) std::cerr << errors << " of " << rows.size() << " rows failed\n";
    return (expanded.strict && errors) ? 2 : 0;
}

int run_check_cmd(const std::string& cache_dir, bool strict) {
    using ftn::acceptance::CheckResult;
    const std::vector<CheckResult> results = {
        ftn::acceptance::criterion_nyquist_degeneration(),
        ftn::acceptance::criterion_kl_oracle(),
        ftn::acceptance::criterion_power_ordering(cache_dir),
        ftn::acceptance::criterion_sqrt_law(),
        ftn::acceptance::criterion_determinism(),
    };
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    }
    std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return (!all && strict) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covertness and covert-rate analysis of accelerated linear modulation"};
    app.set_version_flag("--version", std::string("ftn-covert v") + ftn::version_string);
    app.require_subcommand(1);

    Common o2, o3, o4, os_;
    auto* fig2 = app.add_subcommand("fig2", "covert power and rate vs block length");
    add_common(fig2, o2);
    auto* fig3 = app.add_subcommand("fig3", "covert power vs acceleration factor");
    add_common(fig3, o3);
    auto* fig4 = app.add_subcommand("fig4", "ergodic rerun under Rayleigh block fading");
    add_common(fig4, o4);
    auto* sweep = app.add_subcommand("sweep", "full grid as configured");
    add_common(sweep, os_);

    std::string check_cache;
    bool check_strict = false;
    auto* check = app.add_subcommand("check", "run the wired-in desk-scale checks");
    check->add_option("--cache-dir", check_cache, "eigen-spectrum cache directory");
    check->add_flag("--strict", check_strict, "exit nonzero on any failed check");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*fig2) return run_figure_cmd(ftn::Figure::fig2, o2);
        if (*fig3) return run_figure_cmd(ftn::Figure::fig3, o3);
        if (*fig4) return run_figure_cmd(ftn::Figure::fig4, o4);
        if (*sweep) return run_figure_cmd(ftn::Figure::sweep, os_);
        if (*check) return run_check_cmd(check_cache, check_strict);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

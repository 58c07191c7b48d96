#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "common.hpp"
#include "pulse.hpp"

namespace ftn {

enum class SpectrumPath { asymptotic, exact };

// Experiment-level knobs. List fields left empty mean "use the figure's own
// default grid"; each runner fills them in. sigma_w_sq and n0 describe the
// same noise (sigma_w^2 = N0/2), so a mismatch is rejected unless explicitly
// allowed for what-if runs.
struct ExperimentConfig {
    double alpha = 0.3;
    double T = 1.0;
    std::vector<double> taus;      // empty: figure default
    std::vector<double> epsilons;  // empty: figure default
    std::vector<int> n_primes;     // empty: figure default
    double sigma_w_sq = 1.0;
    double n0 = 2.0;
    double h_aw_sq = 1.0;
    double h_ab_sq = 1.0;
    std::uint64_t trials = 100000;  // Monte Carlo objective probes
    std::uint64_t draws = 10000;    // fading draws, ergodic runs
    std::uint64_t seed = 1;
    SpectrumPath spectrum = SpectrumPath::asymptotic;
    std::vector<std::string> constraints;  // "kl", "bayes"; empty: figure default
    std::size_t curve_buckets = 96;
    bool allow_noise_mismatch = false;
    // presentation knobs, excluded from the config hash
    int workers = 0;  // 0: hardware concurrency
    std::string cache_dir;
    std::string out;
    bool strict = false;

    PulseConfig pulse(double tau) const {
        PulseConfig p;
        p.alpha = alpha;
        p.T = T;
        p.tau = tau;
        return p;
    }

    void validate() const {
        PulseConfig probe{alpha, T, 0.5};
        probe.validate();
        for (double t : taus) ExperimentConfig::pulse(t).validate();
        for (double e : epsilons)
            if (!(e >= 0.0) || !(e < 1.0))
                throw std::invalid_argument("config: eps must lie in [0, 1)");
        for (int np : n_primes)
            if (np < 1) throw std::invalid_argument("config: n_prime must be >= 1");
        if (!(sigma_w_sq > 0.0)) throw std::invalid_argument("config: sigma_w_sq must be positive");
        if (!(n0 > 0.0)) throw std::invalid_argument("config: n0 must be positive");
        if (!(h_aw_sq >= 0.0)) throw std::invalid_argument("config: h_aw_sq must be >= 0");
        if (!(h_ab_sq >= 0.0)) throw std::invalid_argument("config: h_ab_sq must be >= 0");
        if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
        if (draws < 1) throw std::invalid_argument("config: draws must be >= 1");
        for (const auto& c : constraints)
            if (c != "kl" && c != "bayes")
                throw std::invalid_argument("config: constraint must be kl or bayes");
        if (!allow_noise_mismatch && std::abs(sigma_w_sq - 0.5 * n0) > 1e-12 * n0)
            throw std::invalid_argument(
                "config: sigma_w_sq must equal n0/2 (set allow_noise_mismatch=1 to override)");
    }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw std::invalid_argument("config: bad value for '" + key + "': " + v);
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw std::invalid_argument("config: bad value for '" + key + "': " + v);
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

// "a,b,c" or "lo:hi:step"
inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (v.find(':') != std::string::npos) {
        const auto parts = split(v, ':');
        if (parts.size() != 3)
            throw std::invalid_argument("config: range for '" + key + "' needs lo:hi:step");
        const double lo = parse_double(key, parts[0]);
        const double hi = parse_double(key, parts[1]);
        const double step = parse_double(key, parts[2]);
        if (!(step > 0.0) || hi < lo)
            throw std::invalid_argument("config: bad range for '" + key + "'");
        for (int i = 0;; ++i) {
            const double x = lo + step * i;
            if (x > hi + 1e-9 * step) break;
            out.push_back(x);
        }
    } else {
        for (const auto& tok : split(v, ','))
            if (!tok.empty()) out.push_back(parse_double(key, tok));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for '" + key + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw std::invalid_argument("config: bad value for '" + key + "': " + v);
}

inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace detail

// Applies "key=value" settings in order. Unknown keys and malformed values
// throw with the key named; values win left to right.
inline void apply_config(ExperimentConfig& cfg, const std::vector<std::string>& settings) {
    for (const auto& line : settings) {
        std::string s = line;
        // strip comments and surrounding whitespace
        if (const auto h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
        const auto l = s.find_first_not_of(" \t\r\n");
        if (l == std::string::npos) continue;
        const auto r = s.find_last_not_of(" \t\r\n");
        s = s.substr(l, r - l + 1);
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got '" + s + "'");
        const std::string key = s.substr(0, eq);
        const std::string val = s.substr(eq + 1);
        if (key == "alpha") cfg.alpha = detail::parse_double(key, val);
        else if (key == "T") cfg.T = detail::parse_double(key, val);
        else if (key == "tau") cfg.taus = detail::parse_list(key, val);
        else if (key == "eps") cfg.epsilons = detail::parse_list(key, val);
        else if (key == "n_prime") {
            cfg.n_primes.clear();
            for (double x : detail::parse_list(key, val)) {
                const double r_ = std::round(x);
                if (std::abs(x - r_) > 1e-9 || r_ < 1.0)
                    throw std::invalid_argument("config: n_prime entries must be positive integers");
                cfg.n_primes.push_back(static_cast<int>(r_));
            }
        }
        else if (key == "sigma_w_sq") cfg.sigma_w_sq = detail::parse_double(key, val);
        else if (key == "n0") cfg.n0 = detail::parse_double(key, val);
        else if (key == "h_aw_sq") cfg.h_aw_sq = detail::parse_double(key, val);
        else if (key == "h_ab_sq") cfg.h_ab_sq = detail::parse_double(key, val);
        else if (key == "trials") cfg.trials = detail::parse_u64(key, val);
        else if (key == "draws") cfg.draws = detail::parse_u64(key, val);
        else if (key == "seed") cfg.seed = detail::parse_u64(key, val);
        else if (key == "spectrum") {
            if (val == "asymptotic") cfg.spectrum = SpectrumPath::asymptotic;
            else if (val == "exact") cfg.spectrum = SpectrumPath::exact;
            else throw std::invalid_argument("config: spectrum must be asymptotic or exact");
        }
        else if (key == "constraint") {
            if (val == "both") cfg.constraints = {"kl", "bayes"};
            else cfg.constraints = detail::split(val, ',');
        }
        else if (key == "curve_buckets") cfg.curve_buckets = detail::parse_u64(key, val);
        else if (key == "allow_noise_mismatch") cfg.allow_noise_mismatch = detail::parse_bool(key, val);
        else if (key == "workers") cfg.workers = static_cast<int>(detail::parse_u64(key, val));
        else if (key == "cache_dir") cfg.cache_dir = val;
        else if (key == "out") cfg.out = val;
        else if (key == "strict") cfg.strict = detail::parse_bool(key, val);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

inline ExperimentConfig parse_config(const std::vector<std::string>& settings) {
    ExperimentConfig cfg;
    apply_config(cfg, settings);
    cfg.validate();
    return cfg;
}

// Hash of everything that affects the numbers (presentation knobs excluded);
// stamped into output metadata so reruns can be compared at a glance.
inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::string s;
    const auto add = [&](const std::string& k, const std::string& v) {
        s += k;
        s += '=';
        s += v;
        s += ';';
    };
    const auto join_d = [&](const std::vector<double>& v) {
        std::string o;
        for (double x : v) {
            o += detail::fmt_g17(x);
            o += ',';
        }
        return o;
    };
    add("alpha", detail::fmt_g17(cfg.alpha));
    add("T", detail::fmt_g17(cfg.T));
    add("tau", join_d(cfg.taus));
    add("eps", join_d(cfg.epsilons));
    {
        std::string o;
        for (int x : cfg.n_primes) {
            o += std::to_string(x);
            o += ',';
        }
        add("n_prime", o);
    }
    add("sigma_w_sq", detail::fmt_g17(cfg.sigma_w_sq));
    add("n0", detail::fmt_g17(cfg.n0));
    add("h_aw_sq", detail::fmt_g17(cfg.h_aw_sq));
    add("h_ab_sq", detail::fmt_g17(cfg.h_ab_sq));
    add("trials", std::to_string(cfg.trials));
    add("draws", std::to_string(cfg.draws));
    add("seed", std::to_string(cfg.seed));
    add("spectrum", cfg.spectrum == SpectrumPath::asymptotic ? "asymptotic" : "exact");
    {
        std::string o;
        for (const auto& c : cfg.constraints) {
            o += c;
            o += ',';
        }
        add("constraint", o);
    }
    add("curve_buckets", std::to_string(cfg.curve_buckets));
    add("allow_noise_mismatch", cfg.allow_noise_mismatch ? "1" : "0");
    return fnv1a64(s);
}

}

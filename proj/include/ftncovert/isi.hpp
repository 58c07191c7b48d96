#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "common.hpp"
#include "pulse.hpp"

namespace ftn {

// Eigenvalues below this are clamped up before any log or division; the
// spectrum is asymptotically zero for tau < 1/(1+alpha) but never negative.
inline constexpr double eigenvalue_floor = 1e-12;

// Gram matrix G[m,k] = g((m-k) tau T): symmetric Toeplitz, unit diagonal,
// positive definite at finite N.
struct IsiMatrix {
    int n = 0;
    Eigen::MatrixXd entries;
    PulseConfig cfg;
};

enum class SpectrumKind { exact, asymptotic };

// {lambda_n} plus, for the exact kind, the orthogonal basis V with G = V^T L V.
// Asymptotic spectra keep the folded-spectrum grid order and carry no basis;
// spectra loaded from the disk cache are exact but values-only.
struct EigenSpectrum {
    std::vector<double> values;
    Eigen::MatrixXd basis;  // 0x0 when not available
    SpectrumKind kind = SpectrumKind::exact;
    PulseConfig cfg;

    int n() const { return static_cast<int>(values.size()); }
    double sum() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
};

inline IsiMatrix build_isi_matrix(int n, const PulseConfig& cfg) {
    cfg.validate();
    if (n < 1) throw std::invalid_argument("isi: block length must be >= 1");
    std::vector<double> row(n);
    for (int k = 0; k < n; ++k)
        row[k] = rc_autocorrelation(k * cfg.symbol_interval(), cfg);
    IsiMatrix m;
    m.n = n;
    m.cfg = cfg;
    m.entries.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.entries(i, j) = row[std::abs(i - j)];
    return m;
}

// Dense symmetric eigendecomposition, eigenvalues descending, G = V^T L V.
inline EigenSpectrum eigen_spectrum(const IsiMatrix& g) {
    if (g.n < 1) throw std::invalid_argument("isi: empty matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.entries);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("isi: eigensolve failed to converge");
    EigenSpectrum s;
    s.kind = SpectrumKind::exact;
    s.cfg = g.cfg;
    s.values.resize(g.n);
    s.basis.resize(g.n, g.n);
    for (int i = 0; i < g.n; ++i) {
        const int src = g.n - 1 - i;  // Eigen sorts ascending
        s.values[i] = std::max(solver.eigenvalues()(src), eigenvalue_floor);
        s.basis.row(i) = solver.eigenvectors().col(src).transpose();
    }
    return s;
}

// Folded-spectrum approximation lambda_n ~ (tau T)^-1 H_fo(n/(N tau T)),
// n = 0..N-1 (the one-sided grid; equivalent in distribution by periodicity).
inline EigenSpectrum asymptotic_eigenvalues(int n, const PulseConfig& cfg) {
    cfg.validate();
    if (n < 1) throw std::invalid_argument("isi: block length must be >= 1");
    EigenSpectrum s;
    s.kind = SpectrumKind::asymptotic;
    s.cfg = cfg;
    s.values.resize(n);
    const double st = cfg.symbol_interval();
    for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / (n * st);
        s.values[i] = std::max(folded_spectrum(f, cfg) / st, eigenvalue_floor);
    }
    return s;
}

// ---- on-disk spectrum cache ----
// One file per (alpha, T, tau, N): an ASCII header line
//   ftn-eig-v1 alpha=<a> T=<t> tau=<u> n=<n>\n
// followed by n little-endian IEEE doubles (descending eigenvalues).
// The filename carries the FNV-1a hash of the header; the header is verified
// on load so a hash collision or stale format cannot slip through.

inline std::string cache_header(int n, const PulseConfig& cfg) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "ftn-eig-v1 alpha=%.17g T=%.17g tau=%.17g n=%d\n",
                  cfg.alpha, cfg.T, cfg.tau, n);
    return buf;
}

inline std::filesystem::path cache_path(const std::filesystem::path& dir, int n,
                                        const PulseConfig& cfg) {
    char name[48];
    std::snprintf(name, sizeof name, "ftn-eig-v1-%016llx.bin",
                  static_cast<unsigned long long>(fnv1a64(cache_header(n, cfg))));
    return dir / name;
}

inline bool cache_load(const std::filesystem::path& dir, int n,
                       const PulseConfig& cfg, EigenSpectrum& out) {
    std::ifstream in(cache_path(dir, n, cfg), std::ios::binary);
    if (!in) return false;
    const std::string want = cache_header(n, cfg);
    std::string got(want.size(), '\0');
    in.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (!in || got != want) return false;
    std::vector<double> vals(static_cast<std::size_t>(n));
    in.read(reinterpret_cast<char*>(vals.data()),
            static_cast<std::streamsize>(sizeof(double) * vals.size()));
    if (!in) return false;
    out.values = std::move(vals);
    out.basis.resize(0, 0);
    out.kind = SpectrumKind::exact;
    out.cfg = cfg;
    return true;
}

inline void cache_store(const std::filesystem::path& dir, int n,
                        const PulseConfig& cfg, const EigenSpectrum& s) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(cache_path(dir, n, cfg), std::ios::binary | std::ios::trunc);
    if (!out) return;  // cache is best-effort
    const std::string hdr = cache_header(n, cfg);
    out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
    out.write(reinterpret_cast<const char*>(s.values.data()),
              static_cast<std::streamsize>(sizeof(double) * s.values.size()));
}

// Exact spectrum through the cache; empty dir disables caching.
inline EigenSpectrum cached_eigen_spectrum(const std::filesystem::path& dir, int n,
                                           const PulseConfig& cfg) {
    EigenSpectrum s;
    if (!dir.empty() && cache_load(dir, n, cfg, s)) return s;
    s = eigen_spectrum(build_isi_matrix(n, cfg));
    if (!dir.empty()) cache_store(dir, n, cfg, s);
    return s;
}

// N = ceil(N'/tau) with protection against N'/tau landing a hair under an
// integer in floating point (e.g. 500/0.8).
inline int ftn_block_length(int n_prime, double tau) {
    const double q = n_prime / tau;
    const double r = std::round(q);
    if (std::abs(q - r) < 1e-9) return static_cast<int>(r);
    return static_cast<int>(std::ceil(q));
}

}

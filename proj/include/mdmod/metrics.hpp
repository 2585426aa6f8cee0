#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mdmod/constellation.hpp"
#include "mdmod/error.hpp"
#include "mdmod/parallel.hpp"
#include "mdmod/rng.hpp"

namespace mdmod {

enum class MetricKind { mi, gmi };

struct EstimatorConfig {
    std::int64_t samples_per_point = 0;  // 0: auto, sized so total >= 1e6
    std::uint64_t seed = 1;
    bool antithetic = false;
};

struct MetricEstimate {
    MetricKind kind = MetricKind::mi;
    double value = 0.0;      // bit per 4D symbol
    double std_error = 0.0;  // bit per 4D symbol
    std::int64_t samples = 0;
    double snr_db = 0.0;
    // fingerprint of the evaluated constellation, for consistency checks
    std::string source_name;
    int source_dimension = 0;
    std::size_t source_size = 0;
};

namespace detail {

constexpr double kExpCutoff = -40.0;  // exp() below this is dead weight
constexpr double kLlrClamp = 50.0;
constexpr std::int64_t kChunk = 512;

inline double softplus2(double u) {  // log2(1 + e^u), stable
    constexpr double inv_ln2 = 1.4426950408889634;
    if (u > 0.0) return (u + std::log1p(std::exp(-u))) * inv_ln2;
    return std::log1p(std::exp(u)) * inv_ln2;
}

inline std::int64_t resolve_spp(const EstimatorConfig& cfg, std::size_t m) {
    std::int64_t spp = cfg.samples_per_point;
    if (spp == 0) spp = static_cast<std::int64_t>((1000000 + m - 1) / m);
    if (spp < 1) throw domain_error("samples_per_point must be >= 1");
    if (spp > (std::int64_t{1} << 40) / static_cast<std::int64_t>(m))
        throw domain_error("sample budget overflows the estimator");
    return spp;
}

struct Accum {
    double sum = 0.0;
    double sumsq = 0.0;
};

/// Runs the per-sample kernel over all (point, chunk) tasks with
/// reproducible per-task RNG streams; reduces in fixed task order.
template <typename Kernel>
MetricEstimate run_estimator(const Constellation& c, double snr_db,
                             const EstimatorConfig& cfg, MetricKind kind,
                             Kernel&& kernel) {
    if (!std::isfinite(snr_db)) throw domain_error("snr_db must be finite");
    if (!c.is_normalized(1e-9))
        throw domain_error("constellation must be normalized (unit energy per 2D slot)");
    const std::size_t m = c.size;
    const int n = c.dimension;
    const std::int64_t spp = resolve_spp(cfg, m);
    const double snr = std::pow(10.0, snr_db / 10.0);
    const double sigma_dim = std::sqrt(1.0 / (2.0 * snr));

    const std::int64_t chunks_per_point = (spp + kChunk - 1) / kChunk;
    const std::size_t tasks = m * static_cast<std::size_t>(chunks_per_point);
    std::vector<Accum> parts(tasks);

    parallel_for(tasks, [&](std::size_t t) {
        const std::size_t point = t / chunks_per_point;
        const std::int64_t chunk = static_cast<std::int64_t>(t % chunks_per_point);
        const std::int64_t first = chunk * kChunk;
        const std::int64_t count = std::min<std::int64_t>(kChunk, spp - first);
        CounterRng rng(cfg.seed, (static_cast<std::uint64_t>(point) << 24) ^
                                     static_cast<std::uint64_t>(chunk));
        static thread_local std::vector<double> z, q;
        z.assign(n, 0.0);
        q.assign(m, 0.0);
        Accum acc;
        for (std::int64_t s = 0; s < count; ++s) {
            if (cfg.antithetic && (s & 1)) {
                for (double& v : z) v = -v;
            } else {
                for (double& v : z) v = sigma_dim * rng.next_gaussian();
            }
            const double v = kernel(point, z.data(), q.data(), snr);
            acc.sum += v;
            acc.sumsq += v * v;
        }
        parts[t] = acc;
    });

    double sum = 0.0, sumsq = 0.0;
    for (const auto& p : parts) {
        sum += p.sum;
        sumsq += p.sumsq;
    }
    const double total = static_cast<double>(spp) * static_cast<double>(m);
    const double mean = sum / total;
    const double var = total > 1 ? std::max(0.0, (sumsq - total * mean * mean) / (total - 1.0)) : 0.0;
    const double scale = 4.0 / n;

    MetricEstimate e;
    e.kind = kind;
    e.value = mean * scale;
    e.std_error = std::sqrt(var / total) * scale;
    e.samples = spp * static_cast<std::int64_t>(m);
    e.snr_db = snr_db;
    e.source_name = c.name;
    e.source_dimension = n;
    e.source_size = m;
    return e;
}

} // namespace detail

/// Monte-Carlo MI estimate of I(X;Y), Y = X + Z, isotropic Gaussian noise
/// with variance 1/snr per 2D slot. Stratified: equal samples per point,
/// one counter-based RNG stream per (point, chunk). Value in bit/4D-symbol.
inline MetricEstimate mi_awgn(const Constellation& c, double snr_db,
                              const EstimatorConfig& cfg = {}) {
    const std::size_t m = c.size;
    const int n = c.dimension;
    const double* pts = c.points.data();
    const double log2m = std::log2(static_cast<double>(m));
    constexpr double inv_ln2 = 1.4426950408889634;

    return detail::run_estimator(
        c, snr_db, cfg, MetricKind::mi,
        [m, n, pts, log2m](std::size_t i, const double* z, double* q, double snr) {
            const double* xi = pts + i * n;
            double qmax = -1e300;
            for (std::size_t j = 0; j < m; ++j) {
                const double* xj = pts + j * n;
                double d = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double diff = xi[k] + z[k] - xj[k];
                    d += diff * diff;
                }
                const double qj = -d * snr;
                q[j] = qj;
                if (qj > qmax) qmax = qj;
            }
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double a = q[j] - qmax;
                if (a > detail::kExpCutoff) acc += std::exp(a);
            }
            const double lse = qmax + std::log(acc);
            return log2m - (lse - q[i]) * inv_ln2;
        });
}

/// Monte-Carlo GMI (bit-wise / BICM rate) with exact log-sum-exp bit LLRs,
/// clamped to +-kLlrClamp before the rate integrand. Bit/4D-symbol.
inline MetricEstimate gmi_awgn(const Constellation& c, double snr_db,
                               const EstimatorConfig& cfg = {}) {
    if (!c.labels) throw domain_error("GMI requires labels");
    const std::size_t m = c.size;
    const int n = c.dimension;
    const int bits = c.label_bits();
    const double* pts = c.points.data();
    const std::uint32_t* labs = c.labels->data();

    return detail::run_estimator(
        c, snr_db, cfg, MetricKind::gmi,
        [m, n, bits, pts, labs](std::size_t i, const double* z, double* q, double snr) {
            const double* xi = pts + i * n;
            double qmax = -1e300;
            for (std::size_t j = 0; j < m; ++j) {
                const double* xj = pts + j * n;
                double d = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double diff = xi[k] + z[k] - xj[k];
                    d += diff * diff;
                }
                const double qj = -d * snr;
                q[j] = qj;
                if (qj > qmax) qmax = qj;
            }
            double s_all = 0.0;
            double s_one[32] = {};
            for (std::size_t j = 0; j < m; ++j) {
                const double a = q[j] - qmax;
                if (a <= detail::kExpCutoff) continue;
                const double e = std::exp(a);
                s_all += e;
                const std::uint32_t lab = labs[j];
                for (int k = 0; k < bits; ++k)
                    if (lab >> k & 1u) s_one[k] += e;
            }
            double v = 0.0;
            const std::uint32_t li = labs[i];
            for (int k = 0; k < bits; ++k) {
                const double s1 = s_one[k];
                const double s0 = s_all - s1;
                double llr = std::log(s1) - std::log(s0);  // +-inf when one side empty
                llr = std::min(detail::kLlrClamp, std::max(-detail::kLlrClamp, llr));
                const double u = (li >> k & 1u) ? -llr : llr;
                v += 1.0 - detail::softplus2(u);
            }
            return v;
        });
}

/// NMI = MI / m.
inline double nmi(const MetricEstimate& e, const Constellation& c) {
    if (e.kind != MetricKind::mi) throw domain_error("nmi expects an MI estimate");
    if (e.source_name != c.name || e.source_dimension != c.dimension || e.source_size != c.size)
        throw domain_error("estimate was produced for a different constellation");
    return e.value / spectral_efficiency(c);
}

/// NGMI = GMI / m.
inline double ngmi(const MetricEstimate& e, const Constellation& c) {
    if (e.kind != MetricKind::gmi) throw domain_error("ngmi expects a GMI estimate");
    if (e.source_name != c.name || e.source_dimension != c.dimension || e.source_size != c.size)
        throw domain_error("estimate was produced for a different constellation");
    return e.value / spectral_efficiency(c);
}

} // namespace mdmod

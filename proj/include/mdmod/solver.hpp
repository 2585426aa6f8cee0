#pragma once

#include <cmath>
#include <string>

#include "mdmod/constellation.hpp"
#include "mdmod/error.hpp"
#include "mdmod/metrics.hpp"

namespace mdmod {

struct SolveTarget {
    MetricKind metric = MetricKind::mi;
    double normalized_rate = 0.8;  // ideal code rate R_c
    double tolerance_db = 0.02;
};

struct SnrSolveResult {
    double snr_req_db = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
    double achieved_rate = 0.0;
    double std_error_rate = 0.0;
};

/// SNR at which dual-polarization Gaussian capacity 2*log2(1+SNR) bit/4D
/// equals rate*m: 10*log10(2^(rate*m/2) - 1).
inline double shannon_req_snr(double m, double rate) {
    if (!(m > 0.0) || !(rate > 0.0) || rate > 1.0)
        throw domain_error("shannon_req_snr: need m > 0 and rate in (0, 1]");
    return 10.0 * std::log10(std::exp2(rate * m / 2.0) - 1.0);
}

/// Gap to AWGN capacity at equal rate: SNR_req^R - SNR_req^C.
inline double delta_snr_req(double snr_req_db, double m, double rate) {
    return snr_req_db - shannon_req_snr(m, rate);
}

/// Large-SE limit of the Voronoi-constellation MI gap, 1.53 - gamma_s dB.
inline double asymptotic_vc_gap(double gamma_s_db) {
    if (gamma_s_db < 0.0 || gamma_s_db > 1.53)
        throw domain_error("shaping gain must lie in [0, 1.53] dB");
    return 1.53 - gamma_s_db;
}

namespace detail {

constexpr double kBracketLo = -10.0;
constexpr double kBracketHi = 30.0;

inline MetricEstimate eval_metric(const Constellation& c, MetricKind kind, double snr_db,
                                  const EstimatorConfig& cfg) {
    return kind == MetricKind::mi ? mi_awgn(c, snr_db, cfg) : gmi_awgn(c, snr_db, cfg);
}

} // namespace detail

/// Bisection for the SNR where the normalized metric reaches the target
/// rate. The metric is evaluated with a fixed seed, so the objective is
/// deterministic and (up to MC noise) monotone during one solve.
inline SnrSolveResult required_snr(const Constellation& c, const SolveTarget& target,
                                   EstimatorConfig cfg = {}) {
    if (!(target.normalized_rate > 0.0) || !(target.normalized_rate < 1.0))
        throw domain_error("target normalized_rate must lie in (0, 1)");
    if (!(target.tolerance_db > 0.0)) throw domain_error("tolerance_db must be positive");
    if (target.metric == MetricKind::gmi && !c.labels)
        throw domain_error("GMI requires labels");

    const double m = spectral_efficiency(c);
    const double want = target.normalized_rate * m;  // bit/4D

    for (int attempt = 0;; ++attempt) {
        auto lo_est = detail::eval_metric(c, target.metric, detail::kBracketLo, cfg);
        auto hi_est = detail::eval_metric(c, target.metric, detail::kBracketHi, cfg);
        if (hi_est.value < want)
            throw numeric_error("target rate unreachable: metric at +30 dB is " +
                                std::to_string(hi_est.value) + " < " + std::to_string(want) +
                                " bit/4D");
        if (lo_est.value > want) {
            // metric already above target at the bottom of the bracket
            throw numeric_error("target rate already met at -10 dB; bracket does not apply");
        }
        if (lo_est.value > hi_est.value + 3.0 * (lo_est.std_error + hi_est.std_error)) {
            // non-monotone beyond statistical slack: refine once, then give up
            if (attempt == 0) {
                cfg.samples_per_point = detail::resolve_spp(cfg, c.size) * 4;
                continue;
            }
            throw numeric_error("metric is not monotone in SNR at this sample budget");
        }

        double lo = detail::kBracketLo, hi = detail::kBracketHi;
        int iters = 0;
        while (hi - lo > target.tolerance_db) {
            const double mid = 0.5 * (lo + hi);
            const auto est = detail::eval_metric(c, target.metric, mid, cfg);
            if (est.value < want) lo = mid;
            else hi = mid;
            ++iters;
        }
        const double snr = 0.5 * (lo + hi);
        const auto final_est = detail::eval_metric(c, target.metric, snr, cfg);
        const double achieved = final_est.value / m;
        const double err_rate = final_est.std_error / m;

        // Do not report MC noise as dB precision: if the achieved rate is off
        // target beyond 3 sigma, rerun once with a larger budget.
        if (std::fabs(achieved - target.normalized_rate) > 3.0 * err_rate && attempt == 0) {
            cfg.samples_per_point = detail::resolve_spp(cfg, c.size) * 4;
            continue;
        }

        SnrSolveResult r;
        r.snr_req_db = snr;
        r.bracket_lo = lo;
        r.bracket_hi = hi;
        r.iterations = iters;
        r.achieved_rate = achieved;
        r.std_error_rate = err_rate;
        return r;
    }
}

} // namespace mdmod

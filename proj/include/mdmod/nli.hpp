#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mdmod/constellation.hpp"
#include "mdmod/error.hpp"
#include "mdmod/link.hpp"

namespace mdmod {

// Modulation-dependent NLI stand-in: an incoherent-GN frequency-domain
// integral for the Gaussian part plus an EGN-style kurtosis correction built
// from the degenerate (same-channel pair) kernel cells. Per channel,
//   sigma^2_NLI = (eta_gn + eta_corr * Phi) * P^3,
// with Phi the per-2D-slot excess kurtosis of the format. The Gaussian part
// accumulates as N_s^(1+eps) with the usual coherence exponent; the
// correction decays with accumulated dispersion (span-weighted sum), which
// reproduces the stronger modulation dependence of short single-span links.
// The cited 4D model can replace this behind the same NliCoefficients shape.

struct NliGrid {
    int order_used = 0;        // Gauss-Legendre order per segment
    double rel_change = 0.0;   // last refinement's relative change in eta_gn
    double rel_tol = 1e-3;
};

struct NliCoefficients {
    std::vector<double> eta_gn;    // 1/W^2 per channel, full-link accumulation
    std::vector<double> eta_corr;  // 1/W^2 per channel, multiplies Phi
    double coherence_epsilon = 0.0;
    double corr_span_weight = 1.0;  // sum of per-span decorrelation weights
    NliGrid grid;
};

namespace detail {

/// Accumulated-dispersion decorrelation length of the kurtosis correction.
constexpr double kCorrDecorrKm = 1600.0;

inline const std::vector<std::pair<double, double>>& gauss_legendre(int n) {
    static std::map<int, std::vector<std::pair<double, double>>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::pair<double, double>> nw(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration from a Chebyshev-ish initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        nw[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    return cache.emplace(n, std::move(nw)).first->second;
}

/// Per-span FWM efficiency |mu|^2 at phase mismatch kappa (1/m).
inline double span_kernel(const LinkSpec& link, double kappa) {
    const double ap = link.alpha_power_per_m();
    const double al = ap * link.span_length_m();
    const double e = std::exp(-al);
    return (1.0 - 2.0 * e * std::cos(kappa * link.span_length_m()) + e * e) /
           (ap * ap + kappa * kappa);
}

/// Segment boundaries for one axis: the kernel ridge (nu = 0) gets geometric
/// refinement; the hexagonal clip of the third-band indicator kinks at 0.
inline std::vector<double> axis_segments(double lo, double hi, bool ridge_inside, double rs) {
    std::vector<double> pts{lo, hi};
    auto push = [&](double p) {
        if (p > lo && p < hi) pts.push_back(p);
    };
    push(0.0);
    if (ridge_inside)
        for (double f : {0.1, 0.01})
            for (double s : {-1.0, 1.0}) push(s * f * rs / 2.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

/// Integral of |mu|^2 over the (u, v) cell [-R/2,R/2]^2 clipped by
/// |u + v| <= R/2, for channel offsets (da, db) of the two mixing tones.
inline double cell_integral(const LinkSpec& link, double da, double db, int order) {
    const double rs = link.symbol_rate_hz();
    const double four_pi2_beta2 = 4.0 * M_PI * M_PI * link.beta2_s2_per_m();
    const auto& gl = gauss_legendre(order);
    const auto useg = axis_segments(-rs / 2, rs / 2, da == 0.0, rs);

    double total = 0.0;
    for (std::size_t si = 0; si + 1 < useg.size(); ++si) {
        const double um = 0.5 * (useg[si + 1] + useg[si]);
        const double uh = 0.5 * (useg[si + 1] - useg[si]);
        for (const auto& [xu, wu] : gl) {
            const double u = um + uh * xu;
            const double vlo = std::max(-rs / 2, -rs / 2 - u);
            const double vhi = std::min(rs / 2, rs / 2 - u);
            if (vhi <= vlo) continue;
            const auto vseg = axis_segments(vlo, vhi, db == 0.0, rs);
            double inner = 0.0;
            for (std::size_t sj = 0; sj + 1 < vseg.size(); ++sj) {
                const double vm = 0.5 * (vseg[sj + 1] + vseg[sj]);
                const double vh = 0.5 * (vseg[sj + 1] - vseg[sj]);
                double acc = 0.0;
                for (const auto& [xv, wv] : gl) {
                    const double v = vm + vh * xv;
                    const double kappa = four_pi2_beta2 * (da + u) * (db + v);
                    acc += wv * span_kernel(link, kappa);
                }
                inner += vh * acc;
            }
            total += wu * uh * inner;
        }
    }
    return total;
}

/// Per-span (J_all, J_degenerate) kernel sums for one channel.
inline std::pair<double, double> channel_kernel_sums(const LinkSpec& link, int ch, int order) {
    const int nch = link.channel_count;
    double j_all = 0.0, j_deg = 0.0;
    for (int a = 0; a < nch; ++a) {
        for (int b = 0; b < nch; ++b) {
            const int c = a + b - ch;
            if (c < 0 || c >= nch) continue;  // third tone falls outside the comb
            const double i_cell = cell_integral(link, (a - ch) * link.spacing_hz(),
                                                (b - ch) * link.spacing_hz(), order);
            j_all += i_cell;
            if (a == b) j_deg += i_cell;
        }
    }
    return {j_all, j_deg};
}

/// Coherent-accumulation exponent (closed-form GN approximation).
inline double coherence_epsilon(const LinkSpec& link) {
    const double leff_a = 1.0 / link.alpha_power_per_m();
    const double bw = link.channel_count * link.spacing_hz();
    const double arg = (M_PI * M_PI / 2.0) * std::fabs(link.beta2_s2_per_m()) * leff_a * bw * bw;
    return 0.3 * std::log(1.0 + 6.0 * leff_a / (link.span_length_m() * std::asinh(arg)));
}

inline double corr_span_weight(const LinkSpec& link) {
    double w = 0.0;
    for (int s = 0; s < link.span_count; ++s)
        w += 1.0 / (1.0 + s * link.span_length / kCorrDecorrKm);
    return w;
}

} // namespace detail

/// Numerically integrates the per-channel NLI coefficients with uniform grid
/// refinement until the channel totals move by less than grid.rel_tol.
inline NliCoefficients nli_coefficients(const LinkSpec& link) {
    validate(link);
    const int nch = link.channel_count;
    const int center = link.center_channel();
    const double gamma = link.gamma_nl / 1e3;  // 1/W/m
    const double rs = link.symbol_rate_hz();
    const double pref_gn = (16.0 / 27.0) * gamma * gamma / (rs * rs);
    const double pref_corr = (80.0 / 81.0) * gamma * gamma / (rs * rs);

    NliCoefficients out;
    out.coherence_epsilon = detail::coherence_epsilon(link);
    out.corr_span_weight = detail::corr_span_weight(link);
    const double gn_spans = std::pow(link.span_count, 1.0 + out.coherence_epsilon);

    // exact comb symmetry: integrate the lower half, mirror the rest
    std::vector<double> j_all(nch), j_deg(nch);
    double prev = -1.0;
    for (int order : {16, 24, 32, 48}) {
        double total = 0.0;
        for (int ch = 0; ch <= center; ++ch) {
            auto [ja, jd] = detail::channel_kernel_sums(link, ch, order);
            j_all[ch] = j_all[nch - 1 - ch] = ja;
            j_deg[ch] = j_deg[nch - 1 - ch] = jd;
            total += ja;
        }
        out.grid.order_used = order;
        if (prev > 0.0) {
            out.grid.rel_change = std::fabs(total - prev) / total;
            if (out.grid.rel_change < out.grid.rel_tol) break;
            if (order == 48)
                throw numeric_error("NLI integration did not converge: relative change " +
                                    std::to_string(out.grid.rel_change) + " at order 48");
        }
        prev = total;
    }

    out.eta_gn.resize(nch);
    out.eta_corr.resize(nch);
    for (int ch = 0; ch < nch; ++ch) {
        out.eta_gn[ch] = pref_gn * gn_spans * j_all[ch];
        out.eta_corr[ch] = pref_corr * out.corr_span_weight * j_deg[ch];
    }
    return out;
}

/// Reference moments of Gaussian modulation (the GN baseline, Phi = 0).
inline MomentSummary gaussian_moments() {
    MomentSummary ms;
    ms.mu2 = 1.0;
    ms.mu4 = 2.0;
    ms.excess_kurtosis = 0.0;
    return ms;
}

/// Per-channel effective SNR (dB) at equal launch power p_dbm per channel.
inline std::vector<double> snr_eff(const LinkSpec& link, const NliCoefficients& coeffs,
                                   const MomentSummary& ms, double p_dbm) {
    const double p = std::pow(10.0, (p_dbm - 30.0) / 10.0);
    const double pase = ase_power(link);
    std::vector<double> out(coeffs.eta_gn.size());
    for (std::size_t ch = 0; ch < out.size(); ++ch) {
        const double eta = coeffs.eta_gn[ch] + coeffs.eta_corr[ch] * ms.excess_kurtosis;
        if (eta <= 0.0) throw numeric_error("correction dominates; model invalid");
        out[ch] = 10.0 * std::log10(p / (pase + eta * p * p * p));
    }
    return out;
}

struct NliResult {
    double ase_w = 0.0;
    // per channel, each at its own closed-form optimum (P_ASE = 2 sigma^2_NLI)
    std::vector<double> p_opt_dbm;
    std::vector<double> nli_w_at_opt;
    std::vector<double> snr_eff_db;
    // equal-power presentation: one scalar launch power (center optimum)
    double joint_p_dbm = 0.0;
    std::vector<double> snr_eff_joint_db;
    int center_index = 0;
    double center_snr_eff_db = 0.0;
    NliGrid grid;
};

/// Maximizes SNR_eff over launch power. Cubic noise model, so per channel
/// P_opt = (P_ASE / (2 eta_eff))^(1/3) and the NLI power at the optimum is
/// exactly P_ASE / 2. The joint equal-power columns launch every channel at
/// the center channel's optimum.
inline NliResult optimize_power(const LinkSpec& link, const NliCoefficients& coeffs,
                                const MomentSummary& ms) {
    NliResult r;
    r.ase_w = ase_power(link);
    r.center_index = link.center_channel();
    r.grid = coeffs.grid;
    const std::size_t nch = coeffs.eta_gn.size();
    r.p_opt_dbm.resize(nch);
    r.nli_w_at_opt.resize(nch);
    r.snr_eff_db.resize(nch);
    for (std::size_t ch = 0; ch < nch; ++ch) {
        const double eta = coeffs.eta_gn[ch] + coeffs.eta_corr[ch] * ms.excess_kurtosis;
        if (eta <= 0.0) throw numeric_error("correction dominates; model invalid");
        const double p_opt = std::cbrt(r.ase_w / (2.0 * eta));
        r.p_opt_dbm[ch] = 10.0 * std::log10(p_opt) + 30.0;
        r.nli_w_at_opt[ch] = eta * p_opt * p_opt * p_opt;
        r.snr_eff_db[ch] = 10.0 * std::log10(p_opt / (r.ase_w + r.nli_w_at_opt[ch]));
    }
    r.joint_p_dbm = r.p_opt_dbm[r.center_index];
    r.snr_eff_joint_db = snr_eff(link, coeffs, ms, r.joint_p_dbm);
    r.center_snr_eff_db = r.snr_eff_db[r.center_index];
    return r;
}

/// Total shaping gap/gain: -delta_req + delta_eff (B2B has delta_eff = 0).
inline double delta_snr_tot(double delta_req_db, double delta_eff_db) {
    return -delta_req_db + delta_eff_db;
}

} // namespace mdmod

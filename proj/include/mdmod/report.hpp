#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "mdmod/constellation.hpp"
#include "mdmod/error.hpp"
#include "mdmod/io.hpp"
#include "mdmod/link.hpp"
#include "mdmod/metrics.hpp"
#include "mdmod/nli.hpp"
#include "mdmod/qam.hpp"
#include "mdmod/solver.hpp"

namespace mdmod {

struct SweepPlan {
    std::vector<std::string> constellations;  // specs: see resolve_format
    MetricKind metric = MetricKind::mi;
    double rate = 0.8;
    std::vector<std::string> links;  // preset names or config paths
    std::uint64_t seed = 1;
    std::int64_t samples_per_point = 0;  // 0: estimator default
    std::vector<double> gamma_s_db;      // asymptotic VC gap reference lines
    std::string corpus_root = "data";
};

enum class RowStatus { ok, gaussian, skipped_missing, error };

inline std::string to_string(RowStatus s) {
    switch (s) {
    case RowStatus::ok: return "ok";
    case RowStatus::gaussian: return "gaussian";
    case RowStatus::skipped_missing: return "skipped:missing-corpus";
    case RowStatus::error: return "error";
    }
    return "?";
}

/// A resolved constellation spec. Specs:
///   qam:<bits>        generated QAM (bits per 2D)
///   pm:<spec>         cartesian square of a 2D spec
///   gaussian:<m>      Gaussian reference pseudo-format at SE m
///   <path>            constellation file (anything with '/' or '.txt')
///   <name>            <corpus>/constellations/<name>.txt, skip if absent
struct FormatRef {
    RowStatus status = RowStatus::ok;
    std::string spec;
    std::string name;
    std::optional<Constellation> c;
    double gaussian_m = 0.0;
    std::string error;
};

inline FormatRef resolve_format(const std::string& spec, const std::string& corpus_root) {
    FormatRef f;
    f.spec = spec;
    try {
        if (spec.rfind("gaussian:", 0) == 0) {
            f.status = RowStatus::gaussian;
            f.gaussian_m = std::stod(spec.substr(9));
            f.name = spec;
            if (!(f.gaussian_m > 0)) throw domain_error("gaussian SE must be positive");
            return f;
        }
        if (spec.rfind("pm:", 0) == 0) {
            FormatRef inner = resolve_format(spec.substr(3), corpus_root);
            if (inner.status != RowStatus::ok) {
                inner.spec = spec;
                return inner;
            }
            f.c = normalize(cartesian_square(*inner.c));
            f.name = f.c->name;
            return f;
        }
        if (spec.rfind("qam:", 0) == 0) {
            f.c = generate_qam(std::stoi(spec.substr(4)));
            f.name = f.c->name;
            return f;
        }
        std::string path = spec;
        if (spec.find('/') == std::string::npos && spec.find(".txt") == std::string::npos)
            path = corpus_root + "/constellations/" + spec + ".txt";
        if (!std::filesystem::exists(path)) {
            f.status = RowStatus::skipped_missing;
            f.name = spec;
            return f;
        }
        f.c = load_constellation(path);
        f.name = f.c->name;
        return f;
    } catch (const std::exception& e) {
        f.status = RowStatus::error;
        f.error = e.what();
        if (f.name.empty()) f.name = spec;
        return f;
    }
}

/// Link preset names resolve under <corpus>/links/<name>.cfg.
inline LinkSpec resolve_link(const std::string& spec, const std::string& corpus_root) {
    std::string path = spec;
    if (spec.find('/') == std::string::npos && spec.find(".cfg") == std::string::npos)
        path = corpus_root + "/links/" + spec + ".cfg";
    return load_link(path);
}

namespace detail {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string csv_opt(const std::optional<double>& v) {
    return v ? csv_num(*v) : std::string{};
}

} // namespace detail

// ---------------------------------------------------------------- gap sweep

struct GapRow {
    std::string format;
    RowStatus status = RowStatus::ok;
    int dimension = 0;
    std::size_t size = 0;
    double m = 0.0;
    std::string metric;
    double rate = 0.0;
    std::optional<double> snr_req_db;
    std::optional<double> snr_req_c_db;
    std::optional<double> delta_req_db;
    std::optional<double> achieved_rate;
    std::optional<double> std_error_rate;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::string error;
};

/// One row per constellation: required SNR at the target normalized rate and
/// the Eq.-style gap to the Gaussian reference; reference rows for each
/// configured asymptotic shaping gain. Row failures do not stop the sweep.
inline std::vector<GapRow> gap_sweep(const SweepPlan& plan) {
    std::vector<GapRow> rows;
    for (const auto& spec : plan.constellations) {
        GapRow row;
        row.metric = plan.metric == MetricKind::mi ? "mi" : "gmi";
        row.rate = plan.rate;
        row.seed = plan.seed;
        FormatRef f = resolve_format(spec, plan.corpus_root);
        row.format = f.name;
        row.status = f.status;
        row.error = f.error;
        if (f.status == RowStatus::gaussian) {
            row.m = f.gaussian_m;
            row.snr_req_c_db = shannon_req_snr(f.gaussian_m, plan.rate);
            row.snr_req_db = row.snr_req_c_db;
            row.delta_req_db = 0.0;
        } else if (f.status == RowStatus::ok) {
            row.dimension = f.c->dimension;
            row.size = f.c->size;
            row.m = spectral_efficiency(*f.c);
            row.snr_req_c_db = shannon_req_snr(row.m, plan.rate);
            try {
                EstimatorConfig cfg{plan.samples_per_point, plan.seed, false};
                auto res = required_snr(*f.c, {plan.metric, plan.rate, 0.02}, cfg);
                row.snr_req_db = res.snr_req_db;
                row.delta_req_db = delta_snr_req(res.snr_req_db, row.m, plan.rate);
                row.achieved_rate = res.achieved_rate;
                row.std_error_rate = res.std_error_rate;
                row.samples = detail::resolve_spp(cfg, f.c->size) *
                              static_cast<std::int64_t>(f.c->size);
            } catch (const std::exception& e) {
                row.status = RowStatus::error;
                row.error = e.what();
            }
        }
        rows.push_back(std::move(row));
    }
    for (double gs : plan.gamma_s_db) {
        GapRow row;
        row.format = "asymptotic-gap:" + detail::csv_num(gs);
        row.status = RowStatus::ok;
        row.metric = "reference";
        row.rate = plan.rate;
        row.delta_req_db = asymptotic_vc_gap(gs);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_gap_csv(const std::vector<GapRow>& rows, std::ostream& out) {
    out << "# schema: mdmod.gap.v1\n";
    out << "format,status,N,M,m,metric,rate,snr_req_db,snr_req_c_db,delta_req_db,"
           "achieved_rate,std_error_rate,samples,seed,error\n";
    for (const auto& r : rows) {
        out << r.format << ',' << to_string(r.status) << ',' << r.dimension << ',' << r.size
            << ',' << detail::csv_num(r.m) << ',' << r.metric << ',' << detail::csv_num(r.rate)
            << ',' << detail::csv_opt(r.snr_req_db) << ',' << detail::csv_opt(r.snr_req_c_db)
            << ',' << detail::csv_opt(r.delta_req_db) << ',' << detail::csv_opt(r.achieved_rate)
            << ',' << detail::csv_opt(r.std_error_rate) << ',' << r.samples << ',' << r.seed
            << ',' << r.error << '\n';
    }
}

// ----------------------------------------------------------------- nli sweep

struct NliChannelRow {
    std::string format;
    std::string link;
    RowStatus status = RowStatus::ok;
    double phi = 0.0;
    int channel = 0;  // 1-based
    bool is_center = false;
    std::optional<double> p_opt_dbm;
    std::optional<double> snr_eff_db;        // at the channel's own optimum
    std::optional<double> snr_eff_joint_db;  // at the joint equal power
    std::string error;
};

/// Per-channel optimal effective SNR for each format x link (figure data).
inline std::vector<NliChannelRow> nli_sweep(const SweepPlan& plan) {
    std::vector<NliChannelRow> rows;
    for (const auto& link_spec : plan.links) {
        LinkSpec link = resolve_link(link_spec, plan.corpus_root);
        const NliCoefficients coeffs = nli_coefficients(link);
        for (const auto& spec : plan.constellations) {
            FormatRef f = resolve_format(spec, plan.corpus_root);
            NliChannelRow proto;
            proto.format = f.name;
            proto.link = link_spec;
            proto.status = f.status;
            proto.error = f.error;
            if (f.status == RowStatus::skipped_missing || f.status == RowStatus::error) {
                rows.push_back(proto);
                continue;
            }
            MomentSummary ms =
                f.status == RowStatus::gaussian ? gaussian_moments() : moments(*f.c);
            proto.phi = ms.excess_kurtosis;
            try {
                NliResult res = optimize_power(link, coeffs, ms);
                for (int ch = 0; ch < link.channel_count; ++ch) {
                    NliChannelRow row = proto;
                    row.channel = ch + 1;
                    row.is_center = ch == res.center_index;
                    row.p_opt_dbm = res.p_opt_dbm[ch];
                    row.snr_eff_db = res.snr_eff_db[ch];
                    row.snr_eff_joint_db = res.snr_eff_joint_db[ch];
                    rows.push_back(std::move(row));
                }
            } catch (const std::exception& e) {
                proto.status = RowStatus::error;
                proto.error = e.what();
                rows.push_back(proto);
            }
        }
    }
    return rows;
}

inline void write_nli_csv(const std::vector<NliChannelRow>& rows, std::ostream& out) {
    out << "# schema: mdmod.nli.v1\n";
    out << "format,link,status,phi,channel,is_center,p_opt_dbm,snr_eff_db,snr_eff_joint_db,error\n";
    for (const auto& r : rows) {
        out << r.format << ',' << r.link << ',' << to_string(r.status) << ','
            << detail::csv_num(r.phi) << ',' << r.channel << ',' << (r.is_center ? 1 : 0) << ','
            << detail::csv_opt(r.p_opt_dbm) << ',' << detail::csv_opt(r.snr_eff_db) << ','
            << detail::csv_opt(r.snr_eff_joint_db) << ',' << r.error << '\n';
    }
}

// -------------------------------------------------------------- full report

struct ReportRow {
    std::string format;
    std::string link;  // "b2b" or a link spec
    RowStatus status = RowStatus::ok;
    int dimension = 0;
    std::size_t size = 0;
    double m = 0.0;
    double phi = 0.0;
    std::optional<double> snr_req_mi_db;
    std::optional<double> snr_req_gmi_db;
    std::optional<double> snr_req_c_db;
    std::optional<double> delta_req_mi_db;
    std::optional<double> delta_req_gmi_db;
    std::optional<double> snr_eff_db;    // center channel, own optimum
    std::optional<double> delta_eff_db;  // vs the Gaussian reference row
    std::optional<double> delta_tot_mi_db;
    std::optional<double> delta_tot_gmi_db;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::optional<double> std_error_mi;
    std::optional<double> std_error_gmi;
    std::string error;
};

/// Required-SNR and effective-SNR summary per format, one row per link plus a
/// back-to-back row (pure AWGN: delta_eff = 0). The Gaussian pseudo-format
/// supplies the per-link effective-SNR reference that delta_eff compares to.
inline std::vector<ReportRow> report_sweep(const SweepPlan& plan) {
    struct Solved {
        FormatRef f;
        ReportRow base;
    };
    std::vector<Solved> solved;
    for (const auto& spec : plan.constellations) {
        Solved s;
        s.f = resolve_format(spec, plan.corpus_root);
        ReportRow& row = s.base;
        row.format = s.f.name;
        row.status = s.f.status;
        row.error = s.f.error;
        row.seed = plan.seed;
        if (s.f.status == RowStatus::gaussian) {
            row.m = s.f.gaussian_m;
            row.snr_req_c_db = shannon_req_snr(row.m, plan.rate);
            row.snr_req_mi_db = row.snr_req_c_db;
            row.delta_req_mi_db = 0.0;
            row.phi = 0.0;
        } else if (s.f.status == RowStatus::ok) {
            const Constellation& c = *s.f.c;
            row.dimension = c.dimension;
            row.size = c.size;
            row.m = spectral_efficiency(c);
            row.phi = moments(c).excess_kurtosis;
            row.snr_req_c_db = shannon_req_snr(row.m, plan.rate);
            EstimatorConfig cfg{plan.samples_per_point, plan.seed, false};
            row.samples =
                detail::resolve_spp(cfg, c.size) * static_cast<std::int64_t>(c.size);
            try {
                auto mi = required_snr(c, {MetricKind::mi, plan.rate, 0.02}, cfg);
                row.snr_req_mi_db = mi.snr_req_db;
                row.delta_req_mi_db = delta_snr_req(mi.snr_req_db, row.m, plan.rate);
                row.std_error_mi = mi.std_error_rate * row.m;
                if (c.labels) {
                    auto gmi = required_snr(c, {MetricKind::gmi, plan.rate, 0.02}, cfg);
                    row.snr_req_gmi_db = gmi.snr_req_db;
                    row.delta_req_gmi_db = delta_snr_req(gmi.snr_req_db, row.m, plan.rate);
                    row.std_error_gmi = gmi.std_error_rate * row.m;
                }
            } catch (const std::exception& e) {
                row.status = RowStatus::error;
                row.error = e.what();
            }
        }
        solved.push_back(std::move(s));
    }

    std::vector<ReportRow> rows;
    // back-to-back rows: NLI power is zero, delta_eff = 0
    for (const auto& s : solved) {
        ReportRow row = s.base;
        row.link = "b2b";
        if (row.status == RowStatus::ok || row.status == RowStatus::gaussian) {
            row.delta_eff_db = 0.0;
            if (row.delta_req_mi_db) row.delta_tot_mi_db = delta_snr_tot(*row.delta_req_mi_db, 0.0);
            if (row.delta_req_gmi_db)
                row.delta_tot_gmi_db = delta_snr_tot(*row.delta_req_gmi_db, 0.0);
        }
        rows.push_back(std::move(row));
    }
    for (const auto& link_spec : plan.links) {
        LinkSpec link = resolve_link(link_spec, plan.corpus_root);
        const NliCoefficients coeffs = nli_coefficients(link);
        const NliResult gauss_ref = optimize_power(link, coeffs, gaussian_moments());
        for (const auto& s : solved) {
            ReportRow row = s.base;
            row.link = link_spec;
            if (row.status == RowStatus::ok || row.status == RowStatus::gaussian) {
                try {
                    MomentSummary ms = s.f.status == RowStatus::gaussian
                                           ? gaussian_moments()
                                           : moments(*s.f.c);
                    NliResult res = optimize_power(link, coeffs, ms);
                    row.snr_eff_db = res.center_snr_eff_db;
                    row.delta_eff_db = res.center_snr_eff_db - gauss_ref.center_snr_eff_db;
                    if (row.delta_req_mi_db)
                        row.delta_tot_mi_db =
                            delta_snr_tot(*row.delta_req_mi_db, *row.delta_eff_db);
                    if (row.delta_req_gmi_db)
                        row.delta_tot_gmi_db =
                            delta_snr_tot(*row.delta_req_gmi_db, *row.delta_eff_db);
                } catch (const std::exception& e) {
                    row.status = RowStatus::error;
                    row.error = e.what();
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
    out << "# schema: mdmod.report.v1\n";
    out << "format,link,status,N,M,m,phi,snr_req_mi_db,snr_req_gmi_db,snr_req_c_db,"
           "delta_req_mi_db,delta_req_gmi_db,snr_eff_db,delta_eff_db,delta_tot_mi_db,"
           "delta_tot_gmi_db,samples,seed,std_error_mi,std_error_gmi,error\n";
    for (const auto& r : rows) {
        out << r.format << ',' << r.link << ',' << to_string(r.status) << ',' << r.dimension
            << ',' << r.size << ',' << detail::csv_num(r.m) << ',' << detail::csv_num(r.phi)
            << ',' << detail::csv_opt(r.snr_req_mi_db) << ',' << detail::csv_opt(r.snr_req_gmi_db)
            << ',' << detail::csv_opt(r.snr_req_c_db) << ','
            << detail::csv_opt(r.delta_req_mi_db) << ',' << detail::csv_opt(r.delta_req_gmi_db)
            << ',' << detail::csv_opt(r.snr_eff_db) << ',' << detail::csv_opt(r.delta_eff_db)
            << ',' << detail::csv_opt(r.delta_tot_mi_db) << ','
            << detail::csv_opt(r.delta_tot_gmi_db) << ',' << r.samples << ',' << r.seed << ','
            << detail::csv_opt(r.std_error_mi) << ',' << detail::csv_opt(r.std_error_gmi) << ','
            << r.error << '\n';
    }
}

} // namespace mdmod

// mdmod: batch CLI for multidimensional modulation format evaluation.
// Subcommands: metrics, reqsnr, gap, sweep, nli, report.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdmod/report.hpp"

namespace {

using nlohmann::ordered_json;

std::string default_corpus() {
    if (const char* env = std::getenv("MDMOD_CORPUS")) return env;
    return "data";
}

int write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 2;
    }
    out << text;
    return 0;
}

mdmod::Constellation need_format(const std::string& spec, const std::string& corpus) {
    auto f = mdmod::resolve_format(spec, corpus);
    if (f.status == mdmod::RowStatus::skipped_missing)
        throw mdmod::domain_error("constellation not found: " + spec);
    if (f.status == mdmod::RowStatus::error) throw mdmod::domain_error(f.error);
    if (f.status == mdmod::RowStatus::gaussian)
        throw mdmod::domain_error("the Gaussian pseudo-format has no point set");
    return *f.c;
}

template <typename Rows>
int rows_exit_code(const Rows& rows) {
    for (const auto& r : rows)
        if (r.status == mdmod::RowStatus::error) return 1;
    return 0;
}

ordered_json opt_json(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multidimensional modulation format evaluation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global options after the subcommand name

    std::string corpus = default_corpus();
    std::uint64_t seed = 1;
    std::int64_t samples = 0;
    app.add_option("--corpus", corpus, "corpus root directory (env MDMOD_CORPUS)");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--samples", samples, "Monte-Carlo samples per constellation point");

    // ---- metrics
    auto* cmd_metrics = app.add_subcommand("metrics", "MI/GMI/NMI/NGMI at one SNR");
    std::string m_spec, m_metric = "both", m_out;
    double m_snr = 10.0;
    bool m_json = false;
    cmd_metrics->add_option("--constellation", m_spec, "constellation spec or path")->required();
    cmd_metrics->add_option("--snr", m_snr, "SNR in dB (per 2D slot)")->required();
    cmd_metrics->add_option("--metric", m_metric, "mi | gmi | both");
    cmd_metrics->add_flag("--json", m_json, "single-line JSON output");
    cmd_metrics->add_option("--out", m_out, "output path (default stdout)");

    // ---- reqsnr / gap
    auto* cmd_reqsnr = app.add_subcommand("reqsnr", "required SNR at a target normalized rate");
    auto* cmd_gap = app.add_subcommand("gap", "required SNR and gap to AWGN capacity");
    std::string r_spec, r_metric = "mi", r_out;
    double r_rate = 0.8;
    bool r_json = false;
    for (auto* cmd : {cmd_reqsnr, cmd_gap}) {
        cmd->add_option("--constellation", r_spec, "constellation spec or path")->required();
        cmd->add_option("--metric", r_metric, "mi | gmi");
        cmd->add_option("--rate", r_rate, "target normalized rate (ideal code rate)");
        cmd->add_flag("--json", r_json, "single-line JSON output");
        cmd->add_option("--out", r_out, "output path (default stdout)");
    }

    // ---- sweep (gap CSV over a format set)
    auto* cmd_sweep = app.add_subcommand("sweep", "gap-to-capacity sweep, CSV per format");
    std::vector<std::string> s_specs;
    std::vector<double> s_gamma;
    std::string s_metric = "mi", s_out;
    double s_rate = 0.8;
    bool s_json = false;
    cmd_sweep->add_option("--constellation", s_specs, "constellation specs")->required();
    cmd_sweep->add_option("--metric", s_metric, "mi | gmi");
    cmd_sweep->add_option("--rate", s_rate, "target normalized rate");
    cmd_sweep->add_option("--gamma-s", s_gamma, "asymptotic shaping gains for reference rows (dB)");
    cmd_sweep->add_flag("--json", s_json, "JSON output instead of CSV");
    cmd_sweep->add_option("--out", s_out, "output path (default stdout)");

    // ---- nli (per-channel effective SNR)
    auto* cmd_nli = app.add_subcommand("nli", "per-channel optimal effective SNR, CSV");
    std::vector<std::string> n_specs, n_links;
    std::string n_out;
    bool n_json = false;
    cmd_nli->add_option("--constellation", n_specs, "constellation specs")->required();
    cmd_nli->add_option("--link", n_links, "link presets or config paths")->required();
    cmd_nli->add_flag("--json", n_json, "JSON output instead of CSV");
    cmd_nli->add_option("--out", n_out, "output path (default stdout)");

    // ---- report (required + effective SNR summary)
    auto* cmd_report = app.add_subcommand("report", "full required/effective SNR report, CSV");
    std::vector<std::string> t_specs, t_links;
    std::string t_out;
    double t_rate = 0.8;
    bool t_json = false;
    cmd_report->add_option("--constellation", t_specs, "constellation specs")->required();
    cmd_report->add_option("--link", t_links, "link presets or config paths");
    cmd_report->add_option("--rate", t_rate, "target normalized rate");
    cmd_report->add_flag("--json", t_json, "JSON output instead of CSV");
    cmd_report->add_option("--out", t_out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    auto parse_metric = [](const std::string& s) {
        if (s == "mi") return mdmod::MetricKind::mi;
        if (s == "gmi") return mdmod::MetricKind::gmi;
        throw mdmod::domain_error("metric must be 'mi' or 'gmi'");
    };

    try {
        if (cmd_metrics->parsed()) {
            auto c = need_format(m_spec, corpus);
            mdmod::EstimatorConfig cfg{samples, seed, false};
            ordered_json j;
            j["format"] = c.name;
            j["snr_db"] = m_snr;
            std::ostringstream text;
            text << "format " << c.name << "  snr " << m_snr << " dB\n";
            if (m_metric == "mi" || m_metric == "both") {
                auto e = mdmod::mi_awgn(c, m_snr, cfg);
                j["mi"] = e.value;
                j["nmi"] = mdmod::nmi(e, c);
                j["mi_std_error"] = e.std_error;
                j["samples"] = e.samples;
                text << "  MI  = " << e.value << " bit/4D (+-" << e.std_error
                     << ")  NMI  = " << mdmod::nmi(e, c) << "\n";
            }
            if (m_metric == "gmi" || m_metric == "both") {
                if (!c.labels && m_metric == "both") {
                    j["gmi"] = nullptr;
                } else {
                    auto e = mdmod::gmi_awgn(c, m_snr, cfg);
                    j["gmi"] = e.value;
                    j["ngmi"] = mdmod::ngmi(e, c);
                    j["gmi_std_error"] = e.std_error;
                    j["samples"] = e.samples;
                    text << "  GMI = " << e.value << " bit/4D (+-" << e.std_error
                         << ")  NGMI = " << mdmod::ngmi(e, c) << "\n";
                }
            }
            return write_output(m_json ? j.dump() + "\n" : text.str(), m_out);
        }

        if (cmd_reqsnr->parsed() || cmd_gap->parsed()) {
            auto c = need_format(r_spec, corpus);
            const auto kind = parse_metric(r_metric);
            mdmod::EstimatorConfig cfg{samples, seed, false};
            auto res = mdmod::required_snr(c, {kind, r_rate, 0.02}, cfg);
            const double m = mdmod::spectral_efficiency(c);
            ordered_json j;
            j["format"] = c.name;
            j["metric"] = r_metric;
            j["rate"] = r_rate;
            j["snr_req_db"] = res.snr_req_db;
            j["bracket_lo"] = res.bracket_lo;
            j["bracket_hi"] = res.bracket_hi;
            j["iterations"] = res.iterations;
            j["achieved_rate"] = res.achieved_rate;
            j["std_error_rate"] = res.std_error_rate;
            std::ostringstream text;
            text << "format " << c.name << "  " << r_metric << "@" << r_rate << "\n"
                 << "  SNR_req = " << res.snr_req_db << " dB  (bracket [" << res.bracket_lo
                 << ", " << res.bracket_hi << "], " << res.iterations << " iterations)\n"
                 << "  achieved rate " << res.achieved_rate << " +- " << res.std_error_rate
                 << "\n";
            if (cmd_gap->parsed()) {
                j["snr_req_c_db"] = mdmod::shannon_req_snr(m, r_rate);
                j["delta_req_db"] = mdmod::delta_snr_req(res.snr_req_db, m, r_rate);
                text << "  SNR_req^C = " << mdmod::shannon_req_snr(m, r_rate)
                     << " dB  delta = " << mdmod::delta_snr_req(res.snr_req_db, m, r_rate)
                     << " dB\n";
            }
            return write_output(r_json ? j.dump() + "\n" : text.str(), r_out);
        }

        if (cmd_sweep->parsed()) {
            mdmod::SweepPlan plan;
            plan.constellations = s_specs;
            plan.metric = parse_metric(s_metric);
            plan.rate = s_rate;
            plan.seed = seed;
            plan.samples_per_point = samples;
            plan.gamma_s_db = s_gamma;
            plan.corpus_root = corpus;
            auto rows = mdmod::gap_sweep(plan);
            std::ostringstream out;
            if (s_json) {
                ordered_json arr = ordered_json::array();
                for (const auto& r : rows)
                    arr.push_back({{"format", r.format},
                                   {"status", to_string(r.status)},
                                   {"N", r.dimension},
                                   {"M", r.size},
                                   {"m", r.m},
                                   {"metric", r.metric},
                                   {"rate", r.rate},
                                   {"snr_req_db", opt_json(r.snr_req_db)},
                                   {"snr_req_c_db", opt_json(r.snr_req_c_db)},
                                   {"delta_req_db", opt_json(r.delta_req_db)},
                                   {"achieved_rate", opt_json(r.achieved_rate)},
                                   {"std_error_rate", opt_json(r.std_error_rate)},
                                   {"samples", r.samples},
                                   {"seed", r.seed},
                                   {"error", r.error}});
                out << ordered_json({{"schema", "mdmod.gap.v1"}, {"rows", arr}}).dump(2) << "\n";
            } else {
                mdmod::write_gap_csv(rows, out);
            }
            int rc = write_output(out.str(), s_out);
            return rc ? rc : rows_exit_code(rows);
        }

        if (cmd_nli->parsed()) {
            mdmod::SweepPlan plan;
            plan.constellations = n_specs;
            plan.links = n_links;
            plan.seed = seed;
            plan.corpus_root = corpus;
            auto rows = mdmod::nli_sweep(plan);
            std::ostringstream out;
            if (n_json) {
                ordered_json arr = ordered_json::array();
                for (const auto& r : rows)
                    arr.push_back({{"format", r.format},
                                   {"link", r.link},
                                   {"status", to_string(r.status)},
                                   {"phi", r.phi},
                                   {"channel", r.channel},
                                   {"is_center", r.is_center},
                                   {"p_opt_dbm", opt_json(r.p_opt_dbm)},
                                   {"snr_eff_db", opt_json(r.snr_eff_db)},
                                   {"snr_eff_joint_db", opt_json(r.snr_eff_joint_db)},
                                   {"error", r.error}});
                out << ordered_json({{"schema", "mdmod.nli.v1"}, {"rows", arr}}).dump(2) << "\n";
            } else {
                mdmod::write_nli_csv(rows, out);
            }
            int rc = write_output(out.str(), n_out);
            return rc ? rc : rows_exit_code(rows);
        }

        if (cmd_report->parsed()) {
            mdmod::SweepPlan plan;
            plan.constellations = t_specs;
            plan.links = t_links;
            plan.rate = t_rate;
            plan.seed = seed;
            plan.samples_per_point = samples;
            plan.corpus_root = corpus;
            auto rows = mdmod::report_sweep(plan);
            std::ostringstream out;
            if (t_json) {
                ordered_json arr = ordered_json::array();
                for (const auto& r : rows)
                    arr.push_back({{"format", r.format},
                                   {"link", r.link},
                                   {"status", to_string(r.status)},
                                   {"N", r.dimension},
                                   {"M", r.size},
                                   {"m", r.m},
                                   {"phi", r.phi},
                                   {"snr_req_mi_db", opt_json(r.snr_req_mi_db)},
                                   {"snr_req_gmi_db", opt_json(r.snr_req_gmi_db)},
                                   {"snr_req_c_db", opt_json(r.snr_req_c_db)},
                                   {"delta_req_mi_db", opt_json(r.delta_req_mi_db)},
                                   {"delta_req_gmi_db", opt_json(r.delta_req_gmi_db)},
                                   {"snr_eff_db", opt_json(r.snr_eff_db)},
                                   {"delta_eff_db", opt_json(r.delta_eff_db)},
                                   {"delta_tot_mi_db", opt_json(r.delta_tot_mi_db)},
                                   {"delta_tot_gmi_db", opt_json(r.delta_tot_gmi_db)},
                                   {"samples", r.samples},
                                   {"seed", r.seed},
                                   {"error", r.error}});
                out << ordered_json({{"schema", "mdmod.report.v1"}, {"rows", arr}}).dump(2)
                    << "\n";
            } else {
                mdmod::write_report_csv(rows, out);
            }
            int rc = write_output(out.str(), t_out);
            return rc ? rc : rows_exit_code(rows);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "mdmod/error.hpp"

namespace mdmod {

constexpr double kPlanck = 6.62607015e-34;     // J s
constexpr double kLightSpeed = 299792458.0;    // m/s

/// WDM link description. Field units follow the config file convention:
/// km, dB/km, ps/nm/km, 1/W/km, dB, GBaud, GHz, nm.
struct LinkSpec {
    int span_count = 1;
    double span_length = 80.0;
    double alpha = 0.2;
    double dispersion = 17.0;
    double gamma_nl = 1.3;
    double noise_figure = 5.0;
    double symbol_rate = 96.0;
    double channel_spacing = 100.0;
    int channel_count = 11;
    double center_wavelength = 1550.0;

    double alpha_power_per_m() const { return alpha / (10.0 * std::log10(std::exp(1.0))) / 1e3; }
    double beta2_s2_per_m() const {
        const double d = dispersion * 1e-6;           // s/m^2
        const double lam = center_wavelength * 1e-9;  // m
        return -d * lam * lam / (2.0 * M_PI * kLightSpeed);
    }
    double symbol_rate_hz() const { return symbol_rate * 1e9; }
    double spacing_hz() const { return channel_spacing * 1e9; }
    double span_length_m() const { return span_length * 1e3; }
    int center_channel() const { return channel_count / 2; }
};

inline void validate(const LinkSpec& l) {
    if (l.span_count < 1) throw domain_error("span_count must be >= 1");
    if (!(l.span_length > 0) || !(l.alpha > 0) || !(l.dispersion > 0) || !(l.gamma_nl > 0) ||
        !(l.noise_figure > 0) || !(l.symbol_rate > 0) || !(l.channel_spacing > 0) ||
        !(l.center_wavelength > 0))
        throw domain_error("all physical link quantities must be positive");
    if (l.channel_count < 1 || l.channel_count % 2 == 0)
        throw domain_error("channel_count must be odd so the center channel is well-defined");
    if (l.channel_spacing < l.symbol_rate)
        throw domain_error("channel spacing must be at least the symbol rate");
}

/// Total dual-polarization ASE power per channel over the full link:
/// P_ASE = span_count * NF * h * nu * (G - 1) * R_s, with the EDFA gain
/// G = 10^(alpha * span_length / 10) exactly compensating the span loss.
/// The dB noise figure absorbs the dual-polarization factor (NF ~= 2 n_sp).
inline double ase_power(const LinkSpec& l) {
    validate(l);
    const double gain = std::pow(10.0, l.alpha * l.span_length / 10.0);
    const double nu = kLightSpeed / (l.center_wavelength * 1e-9);
    const double nf = std::pow(10.0, l.noise_figure / 10.0);
    return l.span_count * nf * kPlanck * nu * (gain - 1.0) * l.symbol_rate_hz();
}

/// `key = value` config with `#` comments; exactly the LinkSpec field names.
inline LinkSpec load_link(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open link config: " + path);
    LinkSpec l;
    std::map<std::string, bool> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::istringstream ss(line);
        std::string key, eq;
        if (!(ss >> key)) continue;
        double value;
        if (!(ss >> eq >> value) || eq != "=")
            throw parse_error(path, lineno, "expected 'key = value'");
        if (seen[key]) throw parse_error(path, lineno, "duplicate key '" + key + "'");
        seen[key] = true;
        if (key == "span_count") l.span_count = static_cast<int>(value);
        else if (key == "span_length") l.span_length = value;
        else if (key == "alpha") l.alpha = value;
        else if (key == "dispersion") l.dispersion = value;
        else if (key == "gamma_nl") l.gamma_nl = value;
        else if (key == "noise_figure") l.noise_figure = value;
        else if (key == "symbol_rate") l.symbol_rate = value;
        else if (key == "channel_spacing") l.channel_spacing = value;
        else if (key == "channel_count") l.channel_count = static_cast<int>(value);
        else if (key == "center_wavelength") l.center_wavelength = value;
        else throw parse_error(path, lineno, "unknown key '" + key + "'");
    }
    validate(l);
    return l;
}

} // namespace mdmod

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "mdmod/constellation.hpp"
#include "mdmod/error.hpp"

namespace mdmod {

namespace detail {

/// Strips comments (# to end of line) and returns the next content line.
inline bool next_content_line(std::istream& in, std::string& line, int& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        const auto s = line.find_first_not_of(" \t\r");
        if (s == std::string::npos) continue;
        line = line.substr(s, line.find_last_not_of(" \t\r") - s + 1);
        return true;
    }
    return false;
}

inline std::string format_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Text constellation format:
///   line 1: `N M`; line 2: `labeled` or `unlabeled`;
///   then M rows: `[bitstring] c1 ... cN`. `#` starts a comment.
/// Files hold unnormalized geometry; the loader normalizes and, when asked,
/// reports the scale it applied.
inline Constellation load_constellation(const std::string& path, double* applied_scale = nullptr) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open constellation file: " + path);
    int lineno = 0;
    std::string line;

    if (!detail::next_content_line(in, line, lineno))
        throw parse_error(path, lineno, "missing header line 'N M'");
    Constellation c;
    long m_declared = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> c.dimension >> m_declared) || c.dimension < 2 || m_declared < 2)
            throw parse_error(path, lineno, "malformed header, expected 'N M'");
        std::string extra;
        if (ss >> extra) throw parse_error(path, lineno, "trailing tokens after 'N M'");
    }
    c.size = static_cast<std::size_t>(m_declared);

    if (!detail::next_content_line(in, line, lineno))
        throw parse_error(path, lineno, "missing 'labeled'/'unlabeled' line");
    bool labeled;
    if (line == "labeled") labeled = true;
    else if (line == "unlabeled") labeled = false;
    else throw parse_error(path, lineno, "expected 'labeled' or 'unlabeled', got '" + line + "'");

    const int bits = c.label_bits();
    if (labeled && (std::size_t{1} << bits) != c.size)
        throw parse_error(path, lineno, "labeled size " + std::to_string(c.size) +
                                            " is not a power of two");
    std::vector<std::uint32_t> labels;
    std::unordered_set<std::uint32_t> seen;
    for (std::size_t i = 0; i < c.size; ++i) {
        if (!detail::next_content_line(in, line, lineno))
            throw parse_error(path, lineno, "expected " + std::to_string(c.size) +
                                                " point rows, file ended after " +
                                                std::to_string(i));
        std::istringstream ss(line);
        if (labeled) {
            std::string bitstr;
            ss >> bitstr;
            if (bitstr.size() != static_cast<std::size_t>(bits))
                throw parse_error(path, lineno, "label '" + bitstr + "' is not " +
                                                    std::to_string(bits) + " bits");
            std::uint32_t lab = 0;
            for (char ch : bitstr) {
                if (ch != '0' && ch != '1')
                    throw parse_error(path, lineno, "label '" + bitstr + "' is not binary");
                lab = (lab << 1) | static_cast<std::uint32_t>(ch - '0');
            }
            if (!seen.insert(lab).second)
                throw parse_error(path, lineno, "duplicate label '" + bitstr + "'");
            labels.push_back(lab);
        }
        for (int d = 0; d < c.dimension; ++d) {
            double v;
            if (!(ss >> v))
                throw parse_error(path, lineno, "expected " + std::to_string(c.dimension) +
                                                    " coordinates");
            c.points.push_back(v);
        }
        double extra;
        if (ss >> extra) throw parse_error(path, lineno, "too many coordinates on row");
    }
    if (labeled) c.labels = std::move(labels);
    c.name = std::filesystem::path(path).stem().string();
    validate(c);

    const double e = c.mean_energy_per_slot();
    if (!(e > 0.0)) throw parse_error(path, lineno, "degenerate constellation");
    if (applied_scale) *applied_scale = 1.0 / std::sqrt(e);
    return normalize(c);
}

inline void store_constellation(const Constellation& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw domain_error("cannot write constellation file: " + path);
    if (!c.name.empty()) out << "# " << c.name << "\n";
    out << c.dimension << " " << c.size << "\n";
    out << (c.labels ? "labeled" : "unlabeled") << "\n";
    const int bits = c.label_bits();
    for (std::size_t i = 0; i < c.size; ++i) {
        if (c.labels) {
            std::string bitstr(bits, '0');
            for (int k = 0; k < bits; ++k)
                if ((*c.labels)[i] >> (bits - 1 - k) & 1u) bitstr[k] = '1';
            out << bitstr;
        }
        auto p = c.point(i);
        for (int d = 0; d < c.dimension; ++d)
            out << (d == 0 && !c.labels ? "" : " ") << detail::format_coord(p[d]);
        out << "\n";
    }
}

/// Square generator matrix, row basis: line 1 `N`, then N rows of N entries.
inline std::vector<double> load_lattice_matrix(const std::string& path, int& dim_out) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open lattice file: " + path);
    int lineno = 0;
    std::string line;
    if (!detail::next_content_line(in, line, lineno))
        throw parse_error(path, lineno, "missing dimension line");
    int n = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> n) || n < 1 || n > 32)
            throw parse_error(path, lineno, "malformed dimension line");
    }
    std::vector<double> g;
    for (int r = 0; r < n; ++r) {
        if (!detail::next_content_line(in, line, lineno))
            throw parse_error(path, lineno, "expected " + std::to_string(n) + " matrix rows");
        std::istringstream ss(line);
        for (int cidx = 0; cidx < n; ++cidx) {
            double v;
            if (!(ss >> v)) throw parse_error(path, lineno, "row needs " + std::to_string(n) + " entries");
            g.push_back(v);
        }
    }
    dim_out = n;
    return g;
}

} // namespace mdmod

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mdmod/error.hpp"

namespace mdmod {

/// M points in N real dimensions with uniform probabilities. Two real
/// dimensions form one 2D (complex) slot; the normalization convention is
/// unit mean energy per slot, i.e. (1/M) sum ||x_i||^2 = N/2.
struct Constellation {
    int dimension = 0;                                   // N, positive even
    std::size_t size = 0;                                // M >= 2
    std::vector<double> points;                          // M x N, row-major
    std::optional<std::vector<std::uint32_t>> labels;    // log2(M)-bit words
    std::string name;

    std::span<const double> point(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(dimension),
                static_cast<std::size_t>(dimension)};
    }

    int label_bits() const {
        int b = 0;
        while ((std::size_t{1} << b) < size) ++b;
        return b;
    }

    bool is_power_of_two_size() const { return (size & (size - 1)) == 0; }

    double mean_energy_per_slot() const {
        double e = 0.0;
        for (double v : points) e += v * v;
        return e / (static_cast<double>(size) * (dimension / 2.0));
    }

    bool is_normalized(double rel_tol = 1e-12) const {
        return std::fabs(mean_energy_per_slot() - 1.0) <= rel_tol * 1.0 + rel_tol;
    }
};

/// Checks the structural invariants; throws domain_error on violation.
inline void validate(const Constellation& c) {
    if (c.dimension < 2 || c.dimension % 2 != 0 || c.dimension > 32)
        throw domain_error("constellation dimension must be even, in [2, 32]");
    if (c.size < 2) throw domain_error("constellation needs at least 2 points");
    if (c.points.size() != c.size * static_cast<std::size_t>(c.dimension))
        throw domain_error("point array size does not match M x N");
    for (double v : c.points)
        if (!std::isfinite(v)) throw domain_error("non-finite coordinate");
    if (c.labels) {
        if (!c.is_power_of_two_size())
            throw domain_error("labeled constellation size must be a power of two");
        if (c.labels->size() != c.size)
            throw domain_error("label count does not match point count");
        std::unordered_set<std::uint32_t> seen;
        for (auto l : *c.labels) {
            if (c.label_bits() < 32 && (l >> c.label_bits()) != 0)
                throw domain_error("label wider than log2(M) bits");
            if (!seen.insert(l).second) throw domain_error("duplicate label");
        }
    }
}

/// m = (4/N) log2 M, bit per 4D symbol.
inline double spectral_efficiency(const Constellation& c) {
    return 4.0 / c.dimension * std::log2(static_cast<double>(c.size));
}

/// Scales all points by one positive factor so mean energy per 2D slot is 1.
inline Constellation normalize(const Constellation& c) {
    const double e = c.mean_energy_per_slot();
    if (!(e > 0.0)) throw domain_error("degenerate constellation");
    Constellation out = c;
    const double s = 1.0 / std::sqrt(e);
    for (double& v : out.points) v *= s;
    return out;
}

/// Per-2D-slot moment summary driving the modulation-dependent NLI term.
struct MomentSummary {
    double mu2 = 0.0;              // mean slot energy
    double mu4 = 0.0;              // mean squared slot energy
    double excess_kurtosis = 0.0;  // mu4 / mu2^2 - 2; 0 Gaussian, -1 const-modulus
    std::optional<double> cross_energy;  // N=4: E[e_slot1 * e_slot2]
};

inline MomentSummary moments(const Constellation& c) {
    const int slots = c.dimension / 2;
    double m2 = 0.0, m4 = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < c.size; ++i) {
        auto p = c.point(i);
        double e_first = 0.0;
        for (int s = 0; s < slots; ++s) {
            const double e = p[2 * s] * p[2 * s] + p[2 * s + 1] * p[2 * s + 1];
            m2 += e;
            m4 += e * e;
            if (s == 0) e_first = e;
            if (c.dimension == 4 && s == 1) cross += e_first * e;
        }
    }
    const double denom = static_cast<double>(c.size) * slots;
    MomentSummary ms;
    ms.mu2 = m2 / denom;
    ms.mu4 = m4 / denom;
    ms.excess_kurtosis = ms.mu4 / (ms.mu2 * ms.mu2) - 2.0;
    if (c.dimension == 4) ms.cross_energy = cross / static_cast<double>(c.size);
    return ms;
}

/// Polarization-multiplexes a 2D constellation: M^2 points in 4D, labels
/// concatenated (first slot in the high bits).
inline Constellation cartesian_square(const Constellation& c2d) {
    if (c2d.dimension != 2) throw domain_error("cartesian_square expects a 2D input");
    Constellation out;
    out.dimension = 4;
    out.size = c2d.size * c2d.size;
    out.name = c2d.name.empty() ? "pm" : "pm-" + c2d.name;
    out.points.reserve(out.size * 4);
    const int b = c2d.label_bits();
    std::vector<std::uint32_t> labs;
    if (c2d.labels) labs.reserve(out.size);
    for (std::size_t i = 0; i < c2d.size; ++i) {
        for (std::size_t j = 0; j < c2d.size; ++j) {
            auto a = c2d.point(i);
            auto q = c2d.point(j);
            out.points.insert(out.points.end(), {a[0], a[1], q[0], q[1]});
            if (c2d.labels)
                labs.push_back(((*c2d.labels)[i] << b) | (*c2d.labels)[j]);
        }
    }
    if (c2d.labels) out.labels = std::move(labs);
    return out;
}

} // namespace mdmod

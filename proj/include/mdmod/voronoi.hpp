#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mdmod/constellation.hpp"
#include "mdmod/error.hpp"
#include "mdmod/lattice.hpp"

namespace mdmod {

namespace detail {

/// Diagonalization U A V = D over the integers (Smith-style, without the
/// divisibility-chain fix-up, which the coset index map does not need).
/// Tracks V and V^-1; U is not needed by the callers.
struct SnfResult {
    std::vector<long long> diag;
    std::vector<long long> v;     // n x n
    std::vector<long long> vinv;  // n x n
};

inline SnfResult snf_diagonalize(std::vector<long long> s, int n) {
    SnfResult r;
    r.v.assign(static_cast<std::size_t>(n) * n, 0);
    r.vinv.assign(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) r.v[i * n + i] = r.vinv[i * n + i] = 1;

    auto col_swap = [&](int a, int b) {
        for (int i = 0; i < n; ++i) {
            std::swap(s[i * n + a], s[i * n + b]);
            std::swap(r.v[i * n + a], r.v[i * n + b]);
        }
        for (int j = 0; j < n; ++j) std::swap(r.vinv[a * n + j], r.vinv[b * n + j]);
    };
    auto col_addmul = [&](int dst, int src, long long q) {  // col_dst += q * col_src
        for (int i = 0; i < n; ++i) {
            s[i * n + dst] += q * s[i * n + src];
            r.v[i * n + dst] += q * r.v[i * n + src];
        }
        for (int j = 0; j < n; ++j) r.vinv[src * n + j] -= q * r.vinv[dst * n + j];
    };
    auto col_negate = [&](int a) {
        for (int i = 0; i < n; ++i) {
            s[i * n + a] = -s[i * n + a];
            r.v[i * n + a] = -r.v[i * n + a];
        }
        for (int j = 0; j < n; ++j) r.vinv[a * n + j] = -r.vinv[a * n + j];
    };
    auto row_swap = [&](int a, int b) {
        for (int j = 0; j < n; ++j) std::swap(s[a * n + j], s[b * n + j]);
    };
    auto row_addmul = [&](int dst, int src, long long q) {
        for (int j = 0; j < n; ++j) s[dst * n + j] += q * s[src * n + j];
    };

    for (int t = 0; t < n; ++t) {
        // move the smallest nonzero of the trailing block to the pivot
        int pr = -1, pc = -1;
        for (int i = t; i < n; ++i)
            for (int j = t; j < n; ++j)
                if (s[i * n + j] != 0 &&
                    (pr < 0 || std::llabs(s[i * n + j]) < std::llabs(s[pr * n + pc]))) {
                    pr = i;
                    pc = j;
                }
        if (pr < 0) throw domain_error("shaping basis is rank-deficient");
        if (pr != t) row_swap(pr, t);
        if (pc != t) col_swap(pc, t);

        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (int i = t + 1; i < n; ++i) {
                if (s[i * n + t] == 0) continue;
                const long long q = s[i * n + t] / s[t * n + t];
                row_addmul(i, t, -q);
                if (s[i * n + t] != 0) {
                    row_swap(i, t);
                    dirty = true;
                }
            }
            for (int j = t + 1; j < n; ++j) {
                if (s[t * n + j] == 0) continue;
                const long long q = s[t * n + j] / s[t * n + t];
                col_addmul(j, t, -q);
                if (s[t * n + j] != 0) {
                    col_swap(j, t);
                    dirty = true;
                }
            }
        }
        if (s[t * n + t] < 0) col_negate(t);
    }
    r.diag.resize(n);
    for (int i = 0; i < n; ++i) r.diag[i] = s[i * n + i];
    return r;
}

} // namespace detail

/// Codebook of coding-lattice points (coding_scale * Z^N, shifted by a fixed
/// offset) inside the Voronoi region of a scaled shaping lattice. The index
/// map runs through the diagonalized shaping-in-coding basis.
struct VoronoiConstellation {
    Lattice shaping_base;            // named or generic lattice, unscaled
    long long shaping_scale = 1;     // integer scale; basis = scale * base
    double coding_scale = 1.0;
    std::vector<double> offset;      // in coding units
    int bits = 0;
    std::string name;

    detail::SnfResult index_map;

    int dimension() const { return shaping_base.dimension; }
};

/// Builds a VC from an integer-scaled lattice. The scaled basis must be an
/// integer matrix (the shaping lattice must nest in the coding lattice) and
/// its determinant must be a power of two.
inline VoronoiConstellation make_voronoi(Lattice shaping_base, long long shaping_scale,
                                         double coding_scale, std::vector<double> offset,
                                         std::string name = "vc") {
    const int n = shaping_base.dimension;
    if (shaping_scale < 1) throw domain_error("shaping scale must be a positive integer");
    if (!(coding_scale > 0.0)) throw domain_error("coding scale must be positive");
    if (offset.size() != static_cast<std::size_t>(n))
        throw domain_error("offset dimension mismatch");

    std::vector<long long> b(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double v = shaping_base.generator[i] * static_cast<double>(shaping_scale);
        b[i] = std::llround(v);
        if (std::fabs(v - static_cast<double>(b[i])) > 1e-9)
            throw domain_error("scaled shaping basis is not integer; "
                               "shaping lattice must nest in the coding lattice");
    }
    VoronoiConstellation vc;
    vc.index_map = detail::snf_diagonalize(b, n);

    unsigned long long det = 1;
    int bits = 0;
    for (long long d : vc.index_map.diag) {
        if (d <= 0) throw domain_error("shaping basis is rank-deficient");
        det *= static_cast<unsigned long long>(d);
    }
    while ((1ull << bits) < det) ++bits;
    if ((1ull << bits) != det)
        throw domain_error("codebook size " + std::to_string(det) + " is not a power of two");
    if (bits > 62) throw domain_error("codebook exceeds 2^62 points");

    vc.shaping_base = std::move(shaping_base);
    vc.shaping_scale = shaping_scale;
    vc.coding_scale = coding_scale;
    vc.offset = std::move(offset);
    vc.bits = bits;
    vc.name = std::move(name);
    return vc;
}

/// Default offset: half-integer shifts for Z^n shaping (provably interior),
/// and half shifts plus small unstructured dyadic perturbations otherwise,
/// where pure half-integer offsets always tie a Voronoi wall. The shipped
/// perturbations are certified tie-free by vc_validate.
inline std::vector<double> vc_default_offset(const Lattice& shaping_base) {
    static constexpr int perturb[32] = {
        2731, 1597, 3083, 2113, 1259, 3671, 2897, 1433, 3259, 2029, 1721,
        3917, 2339, 1087, 3541, 2617, 1949, 3307, 1171, 2791, 3637, 1511,
        2243, 3109, 1823, 3449, 1307, 2963, 2069, 3779, 1663, 2521};
    const int n = shaping_base.dimension;
    std::vector<double> o(n, 0.5);
    if (shaping_base.kind != LatticeKind::zn)
        for (int i = 0; i < n; ++i) o[i] += perturb[i] * 0x1.0p-15;
    return o;
}

namespace detail {

/// Nearest shaping-lattice point of y (both in coding units).
inline std::vector<double> quantize_shaping(const VoronoiConstellation& vc,
                                            std::span<const double> y) {
    const int n = vc.dimension();
    const double k = static_cast<double>(vc.shaping_scale);
    if (vc.shaping_base.kind == LatticeKind::generic) {
        Lattice scaled = vc.shaping_base;
        for (double& g : scaled.generator) g *= k;
        return nearest_point(scaled, y);
    }
    std::vector<double> scaled_y(n);
    for (int i = 0; i < n; ++i) scaled_y[i] = y[i] / k;
    auto p = nearest_point(vc.shaping_base, scaled_y);
    for (double& v : p) v *= k;
    return p;
}

} // namespace detail

/// Maps an index to its codebook point (real coordinates).
inline std::vector<double> vc_encode(const VoronoiConstellation& vc, std::uint64_t index) {
    if (index >> vc.bits)
        throw domain_error("index out of range for " + std::to_string(vc.bits) + "-bit VC");
    const int n = vc.dimension();

    // mixed-radix digits over the diagonal, then back through V^-1
    std::vector<long long> digits(n);
    std::uint64_t rest = index;
    for (int i = 0; i < n; ++i) {
        const auto d = static_cast<std::uint64_t>(vc.index_map.diag[i]);
        digits[i] = static_cast<long long>(rest % d);
        rest /= d;
    }
    std::vector<double> w(n, 0.0);
    for (int j = 0; j < n; ++j) {
        long long t = 0;
        for (int i = 0; i < n; ++i) t += digits[i] * vc.index_map.vinv[i * n + j];
        w[j] = static_cast<double>(t) + vc.offset[j];
    }
    const auto q = detail::quantize_shaping(vc, w);
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) p[i] = (w[i] - q[i]) * vc.coding_scale;
    return p;
}

/// Quantizes y to the nearest coding point and inverts the index map. For
/// noiseless codebook points this is the exact inverse of vc_encode.
inline std::uint64_t vc_decode(const VoronoiConstellation& vc, std::span<const double> y) {
    const int n = vc.dimension();
    if (y.size() != static_cast<std::size_t>(n)) throw domain_error("vc_decode: dimension mismatch");
    std::vector<long long> z(n);
    for (int i = 0; i < n; ++i) {
        const double v = y[i] / vc.coding_scale - vc.offset[i];
        if (!std::isfinite(v)) throw domain_error("vc_decode: non-finite input");
        z[i] = static_cast<long long>(detail::round_half_down(v));
    }
    std::uint64_t index = 0;
    std::uint64_t radix = 1;
    for (int i = 0; i < n; ++i) {
        const long long d = vc.index_map.diag[i];
        long long h = 0;
        for (int j = 0; j < n; ++j) h += z[j] * vc.index_map.v[j * n + i];
        const long long g = ((h % d) + d) % d;
        index += static_cast<std::uint64_t>(g) * radix;
        radix *= static_cast<std::uint64_t>(d);
    }
    return index;
}

/// All 2^bits codebook points as a normalized, unlabeled Constellation.
inline Constellation vc_enumerate(const VoronoiConstellation& vc) {
    if (vc.bits > 20) throw numeric_error("enumeration too large (bits > 20)");
    Constellation c;
    c.dimension = vc.dimension();
    c.size = std::size_t{1} << vc.bits;
    c.name = vc.name;
    c.points.reserve(c.size * static_cast<std::size_t>(c.dimension));
    for (std::uint64_t i = 0; i < c.size; ++i) {
        const auto p = vc_encode(vc, i);
        c.points.insert(c.points.end(), p.begin(), p.end());
    }
    return normalize(c);
}

/// Enumerates the codebook and verifies the construction: every point
/// round-trips through vc_decode and lies strictly inside the shaping
/// Voronoi region (no boundary ties). Throws on violation.
inline void vc_validate(const VoronoiConstellation& vc) {
    const int n = vc.dimension();
    Lattice scaled = vc.shaping_base;
    for (double& g : scaled.generator) g *= static_cast<double>(vc.shaping_scale);
    detail::SphereDecoder sd(scaled);

    for (std::uint64_t i = 0; i < (std::uint64_t{1} << vc.bits); ++i) {
        const auto p = vc_encode(vc, i);
        if (vc_decode(vc, p) != i)
            throw numeric_error(vc.name + ": encode/decode mismatch at index " +
                                std::to_string(i));
        std::vector<double> w(n);
        for (int k = 0; k < n; ++k) w[k] = p[k] / vc.coding_scale;
        // strict interior: the nearest nonzero shaping point must be farther
        // away than the origin
        const std::vector<double> origin(n, 0.0);
        const double d0 = detail::dist2({w.data(), w.size()}, origin.data());
        const auto u = sd.decode(scaled, {w.data(), w.size()}, /*exclude_zero=*/true);
        const auto competitor = sd.point_of(scaled, u);
        const double d1 = detail::dist2({w.data(), w.size()}, competitor.data());
        if (d1 <= d0 + 1e-9)
            throw numeric_error(vc.name + ": point " + std::to_string(i) +
                                " ties or crosses the Voronoi boundary");
    }
}

} // namespace mdmod

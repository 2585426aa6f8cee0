#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdmod/error.hpp"

namespace mdmod {

enum class LatticeKind { zn, dn, e8, bw16, generic };

/// A full-rank lattice given by a row basis. The named kinds carry
/// closed-form nearest-point algorithms; generic falls back to
/// depth-first sphere decoding on the generator.
struct Lattice {
    LatticeKind kind = LatticeKind::generic;
    int dimension = 0;
    std::vector<double> generator;  // dimension x dimension, row-major

    std::span<const double> row(int i) const {
        return {generator.data() + static_cast<std::size_t>(i) * dimension,
                static_cast<std::size_t>(dimension)};
    }
};

namespace detail {

/// Round with halves toward the smaller integer, so coordinate ties resolve
/// to the lexicographically smaller lattice point. The +0.0 folds away -0.
inline double round_half_down(double x) { return std::ceil(x - 0.5) + 0.0; }

inline void quantize_zn(std::span<const double> y, double* out) {
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = round_half_down(y[i]);
}

/// Conway-Sloane D_n decoder: round, then if the coordinate sum is odd flip
/// the worst coordinate to its second-nearest integer.
inline void quantize_dn(std::span<const double> y, double* out) {
    const std::size_t n = y.size();
    long long parity = 0;
    std::size_t worst = 0;
    double worst_err = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = round_half_down(y[i]);
        parity += static_cast<long long>(out[i]);
        const double err = std::fabs(y[i] - out[i]);
        if (err > worst_err) {
            worst_err = err;
            worst = i;
        }
    }
    if (parity % 2 != 0) {
        const double err = y[worst] - out[worst];
        out[worst] += err > 0.0 ? 1.0 : -1.0;
    }
}

inline double dist2(std::span<const double> y, const double* p) {
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double t = y[i] - p[i];
        d += t * t;
    }
    return d;
}

inline bool lex_less(const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

/// E8 = D8 union (D8 + h), h = (1/2,...,1/2).
inline void quantize_e8(std::span<const double> y, double* out) {
    std::array<double, 8> cand{};
    std::array<double, 8> shifted{};
    quantize_dn(y, out);
    for (int i = 0; i < 8; ++i) shifted[i] = y[i] - 0.5;
    quantize_dn({shifted.data(), 8}, cand.data());
    for (int i = 0; i < 8; ++i) cand[i] += 0.5;
    const double d0 = dist2(y, out);
    const double d1 = dist2(y, cand.data());
    if (d1 < d0 || (d1 == d0 && lex_less(cand.data(), out, 8)))
        for (int i = 0; i < 8; ++i) out[i] = cand[i];
}

/// BW16 by construction B on RM(1,4): the 32 cosets c + 2*D16.
inline void quantize_bw16(std::span<const double> y, double* out) {
    std::array<double, 16> half{};
    std::array<double, 16> cand{};
    double best = 1e300;
    for (int mask = 0; mask < 32; ++mask) {
        // RM(1,4) codeword: all-ones generator plus the four coordinate bits
        std::array<int, 16> cw{};
        for (int i = 0; i < 16; ++i) {
            int bit = mask & 1;  // all-ones row
            for (int j = 0; j < 4; ++j) bit ^= (mask >> (j + 1)) & ((i >> j) & 1);
            cw[i] = bit;
        }
        for (int i = 0; i < 16; ++i) half[i] = (y[i] - cw[i]) * 0.5;
        quantize_dn({half.data(), 16}, cand.data());
        for (int i = 0; i < 16; ++i) cand[i] = 2.0 * cand[i] + cw[i];
        const double d = dist2(y, cand.data());
        if (d < best || (d == best && lex_less(cand.data(), out, 16))) {
            best = d;
            for (int i = 0; i < 16; ++i) out[i] = cand[i];
        }
    }
}

/// Solves x A = b for row vector x (A n x n row-major). Throws on
/// rank deficiency.
inline std::vector<double> solve_row(const std::vector<double>& a_in, std::span<const double> b,
                                     int n) {
    std::vector<double> a(n * n);
    // transpose so we solve A^T x^T = b^T with standard column elimination
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i * n + j] = a_in[j * n + i];
    std::vector<double> x(b.begin(), b.end());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
        if (std::fabs(a[piv * n + c]) < 1e-12)
            throw domain_error("rank-deficient lattice generator");
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
            std::swap(x[c], x[piv]);
        }
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            if (f == 0.0) continue;
            for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
            x[r] -= f * x[c];
        }
    }
    for (int c = n - 1; c >= 0; --c) {
        for (int j = c + 1; j < n; ++j) x[c] -= a[c * n + j] * x[j];
        x[c] /= a[c * n + c];
    }
    return x;
}

/// Schnorr-Euchner sphere decoder state for p = u G nearest to y.
struct SphereDecoder {
    int n;
    std::vector<double> lower;  // Cholesky factor L of G G^T (lower)
    explicit SphereDecoder(const Lattice& l) : n(l.dimension) {
        std::vector<double> gram(n * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k)
                    s += l.generator[i * n + k] * l.generator[j * n + k];
                gram[i * n + j] = s;
            }
        lower.assign(n * n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = gram[i * n + j];
                for (int k = 0; k < j; ++k) s -= lower[i * n + k] * lower[j * n + k];
                if (i == j) {
                    if (s <= 1e-12) throw domain_error("rank-deficient lattice generator");
                    lower[i * n + i] = std::sqrt(s);
                } else {
                    lower[i * n + j] = s / lower[j * n + j];
                }
            }
        }
    }

    /// Returns integer coefficients of the nearest point; ties resolved by
    /// smallest distance first, then lexicographically smaller point. With
    /// exclude_zero, the all-zero vector is skipped (nearest nonzero point).
    std::vector<long long> decode(const Lattice& l, std::span<const double> y,
                                  bool exclude_zero = false) const {
        const std::vector<double> t = solve_row(l.generator, y, n);
        std::vector<long long> u(n, 0), best_u(n, 0);
        std::vector<double> partial(n + 1, 0.0);
        std::vector<double> center(n, 0.0);
        std::vector<long long> step(n, 0);

        // Babai nearest-plane seed bounds the initial radius
        for (int k = n - 1; k >= 0; --k)
            best_u[k] = static_cast<long long>(round_half_down(offset_center(t, best_u, k)));
        std::vector<double> bp = point_of(l, best_u);
        double best = dist2(y, bp.data());
        if (exclude_zero) {
            bool seed_zero = true;
            for (auto v : best_u) seed_zero = seed_zero && v == 0;
            if (seed_zero) {
                // reseed from the basis vectors so the radius stays finite
                best = 1e300;
                for (int i = 0; i < n; ++i) {
                    for (long long sgn : {-1, 1}) {
                        std::vector<long long> cand(n, 0);
                        cand[i] = sgn;
                        auto p = point_of(l, cand);
                        const double d = dist2(y, p.data());
                        if (d < best) {
                            best = d;
                            best_u = cand;
                            bp = std::move(p);
                        }
                    }
                }
            }
        }

        // Schnorr-Euchner DFS; per level, candidates enumerated in order of
        // |u_k - center_k|, so the first radius failure closes the level.
        int k = n - 1;
        center[k] = offset_center(t, u, k);
        step[k] = 0;
        u[k] = candidate(center[k], 0);
        while (true) {
            const double w = (u[k] - center[k]) * lower[k * n + k];
            const double d = partial[k + 1] + w * w;
            if (d <= best + 1e-12) {
                if (k == 0) {
                    bool is_zero = exclude_zero;
                    if (exclude_zero)
                        for (auto v : u) is_zero = is_zero && v == 0;
                    auto p = point_of(l, u);
                    const double dd = dist2(y, p.data());
                    if (!is_zero &&
                        (dd < best - 1e-12 ||
                         (dd <= best + 1e-12 && lex_less(p.data(), bp.data(), n)))) {
                        best = dd;
                        best_u = u;
                        bp = std::move(p);
                    }
                    u[k] = candidate(center[k], ++step[k]);
                } else {
                    partial[k] = d;
                    --k;
                    center[k] = offset_center(t, u, k);
                    step[k] = 0;
                    u[k] = candidate(center[k], 0);
                }
            } else {
                ++k;
                if (k >= n) break;
                u[k] = candidate(center[k], ++step[k]);
            }
        }
        return best_u;
    }

    std::vector<double> point_of(const Lattice& l, const std::vector<long long>& u) const {
        std::vector<double> p(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) p[j] += u[i] * l.generator[i * n + j];
        return p;
    }

private:
    /// Effective center for level k given fixed u_{k+1..n-1}:
    /// c_k = t_k - sum_{i>k} (u_i - t_i) L_ik / L_kk.
    double offset_center(const std::vector<double>& t, const std::vector<long long>& u,
                         int k) const {
        double s = 0.0;
        for (int i = k + 1; i < n; ++i) s += (u[i] - t[i]) * lower[i * n + k];
        return t[k] - s / lower[k * n + k];
    }

    /// step-th candidate around the center, ordered by |u - center|:
    /// r, r+s, r-s, r+2s, r-2s, ... with s toward the fractional side.
    static long long candidate(double center, long long step) {
        const long long r = static_cast<long long>(round_half_down(center));
        const long long s = center >= static_cast<double>(r) ? 1 : -1;
        const long long off = (step + 1) / 2;
        return step % 2 ? r + s * off : r - s * off;
    }
};

} // namespace detail

inline Lattice make_zn(int n) {
    Lattice l;
    l.kind = LatticeKind::zn;
    l.dimension = n;
    l.generator.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) l.generator[i * n + i] = 1.0;
    return l;
}

inline Lattice make_dn(int n) {
    if (n < 2) throw domain_error("D_n needs n >= 2");
    Lattice l;
    l.kind = LatticeKind::dn;
    l.dimension = n;
    l.generator.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        l.generator[i * n + i] = 1.0;
        l.generator[i * n + i + 1] = -1.0;
    }
    l.generator[(n - 1) * n + (n - 2)] = 1.0;
    l.generator[(n - 1) * n + (n - 1)] = 1.0;
    return l;
}

inline Lattice make_e8() {
    Lattice l;
    l.kind = LatticeKind::e8;
    l.dimension = 8;
    l.generator.assign(64, 0.0);
    l.generator[0] = 2.0;
    for (int i = 1; i < 7; ++i) {
        l.generator[i * 8 + i - 1] = -1.0;
        l.generator[i * 8 + i] = 1.0;
    }
    for (int j = 0; j < 8; ++j) l.generator[7 * 8 + j] = 0.5;
    return l;
}

inline Lattice make_bw16() {
    // HNF basis of construction B on RM(1,4); det 4096.
    static constexpr std::array<std::array<int, 16>, 16> rows = {{
        {1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0, 1},
        {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1},
        {0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1},
        {0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2},
        {0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1},
        {0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2},
        {0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 2},
        {0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 2},
        {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 2},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 2},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 2},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 0, 2},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 2},
        {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4},
    }};
    Lattice l;
    l.kind = LatticeKind::bw16;
    l.dimension = 16;
    l.generator.reserve(256);
    for (const auto& r : rows)
        for (int v : r) l.generator.push_back(static_cast<double>(v));
    return l;
}

inline Lattice make_generic(int n, std::vector<double> generator) {
    if (generator.size() != static_cast<std::size_t>(n) * n)
        throw domain_error("generator must be N x N");
    Lattice l;
    l.kind = LatticeKind::generic;
    l.dimension = n;
    l.generator = std::move(generator);
    [[maybe_unused]] detail::SphereDecoder probe(l);  // validates full rank up front
    return l;
}

/// Nearest lattice point to y in Euclidean distance. Ties on Voronoi
/// boundaries resolve to the lexicographically smallest point.
inline std::vector<double> nearest_point(const Lattice& l, std::span<const double> y) {
    if (y.size() != static_cast<std::size_t>(l.dimension))
        throw domain_error("nearest_point: dimension mismatch");
    for (double v : y)
        if (!std::isfinite(v)) throw domain_error("nearest_point: non-finite input");
    std::vector<double> out(l.dimension, 0.0);
    switch (l.kind) {
    case LatticeKind::zn: detail::quantize_zn(y, out.data()); break;
    case LatticeKind::dn: detail::quantize_dn(y, out.data()); break;
    case LatticeKind::e8: detail::quantize_e8(y, out.data()); break;
    case LatticeKind::bw16: detail::quantize_bw16(y, out.data()); break;
    case LatticeKind::generic: {
        detail::SphereDecoder sd(l);
        out = sd.point_of(l, sd.decode(l, y));
        break;
    }
    }
    return out;
}

} // namespace mdmod

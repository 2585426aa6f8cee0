#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "mdmod/constellation.hpp"
#include "mdmod/error.hpp"

namespace mdmod {

namespace detail {

inline std::uint32_t gray(std::uint32_t i) { return i ^ (i >> 1); }

inline Constellation square_qam(int bits) {
    const int half = bits / 2;
    const std::uint32_t side = 1u << half;
    Constellation c;
    c.dimension = 2;
    c.size = std::size_t{1} << bits;
    std::vector<std::uint32_t> labs;
    for (std::uint32_t ix = 0; ix < side; ++ix) {
        for (std::uint32_t iy = 0; iy < side; ++iy) {
            c.points.push_back(2.0 * ix - (side - 1.0));
            c.points.push_back(2.0 * iy - (side - 1.0));
            labs.push_back((gray(ix) << half) | gray(iy));
        }
    }
    c.labels = std::move(labs);
    return c;
}

// Star 8QAM: inner square (+-1,+-1), outer points at radius 1+sqrt(3) on the
// axes. All nearest-neighbor distances equal; this is the uniform m=6
// baseline geometry. The labeling maximizes GMI over all 8! assignments.
inline Constellation star_8qam() {
    const double r = 1.0 + std::sqrt(3.0);
    Constellation c;
    c.dimension = 2;
    c.size = 8;
    c.points = {1, 1, 1, -1, -1, 1, -1, -1, r, 0, -r, 0, 0, r, 0, -r};
    c.labels = std::vector<std::uint32_t>{7, 4, 2, 1, 6, 0, 3, 5};
    return c;
}

// Cross 32QAM: 8x4 Gray rectangle with the |x|=7 columns folded onto y=+-5
// wings, then labels refined by pairwise/annealed swaps for bit-wise rate.
inline Constellation cross_32qam() {
    static constexpr std::array<std::uint32_t, 32> labs = {
        12, 4,  6,  2,  1,  5,  7,  3,  0,  13, 15, 14, 8,  9,  11, 10,
        24, 25, 27, 26, 16, 29, 31, 30, 17, 21, 23, 19, 28, 20, 22, 18};
    Constellation c;
    c.dimension = 2;
    c.size = 32;
    std::vector<std::uint32_t> l(labs.begin(), labs.end());
    for (int cx = 0; cx < 8; ++cx) {
        for (int cy = 0; cy < 4; ++cy) {
            double x = 2.0 * cx - 7.0;
            double y = 2.0 * cy - 3.0;
            if (std::fabs(x) == 7.0) {
                const double sx = x > 0 ? 1.0 : -1.0;
                const double sy = y > 0 ? 1.0 : -1.0;
                x = sx * (4.0 - std::fabs(y));
                y = sy * 5.0;
            }
            c.points.push_back(x);
            c.points.push_back(y);
        }
    }
    c.labels = std::move(l);
    return c;
}

} // namespace detail

/// Gray-labeled square QAM for even bit counts, the standard star/cross
/// constellations for 8QAM and 32QAM. Output is normalized.
inline Constellation generate_qam(int bits_per_2d) {
    if (bits_per_2d < 1 || bits_per_2d > 8)
        throw domain_error("generate_qam: bits_per_2d must be in 1..8");
    Constellation c;
    switch (bits_per_2d) {
    case 1:
        c.dimension = 2;
        c.size = 2;
        c.points = {-1, 0, 1, 0};
        c.labels = std::vector<std::uint32_t>{0, 1};
        break;
    case 3:
        c = detail::star_8qam();
        break;
    case 5:
        c = detail::cross_32qam();
        break;
    case 7:
        throw domain_error("generate_qam: 128-cross QAM is not shipped");
    default:
        c = detail::square_qam(bits_per_2d);
        break;
    }
    c.name = std::to_string(c.size) + "qam";
    return normalize(c);
}

} // namespace mdmod

#pragma once

// Independent numerical oracles used by the test suite. These deliberately
// avoid the library's Monte-Carlo estimation path: quadrature, golden
// section and brute-force search only.

#include <cmath>
#include <functional>
#include <vector>

#include "mdmod/rng.hpp"

namespace oracle {

/// Probabilists' Gauss-Hermite rule (weight e^{-x^2/2} / sqrt(2 pi)),
/// normalized so the weights sum to 1. Roots of the physicists' polynomial
/// found by Newton from the classic staircase of initial guesses, largest
/// root first, then rescaled by sqrt(2).
inline void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int half = (n + 1) / 2;
    double x = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1) x -= 1.14 * std::pow(n, 0.426) / x;
        else if (i == 2) x = 1.86 * x - 0.86 * nodes[0];
        else if (i == 3) x = 1.91 * x - 0.91 * nodes[1];
        else x = 2.0 * x - nodes[i - 2];

        double pp = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            // orthonormal physicists' Hermite recurrence
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = x * std::sqrt(2.0 / (j + 1)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = x;  // store physicists' roots descending
        nodes[n - 1 - i] = -x;
        weights[i] = weights[n - 1 - i] = 2.0 / (pp * pp);
    }
    double s = 0.0;
    for (double w : weights) s += w;
    for (double& w : weights) w /= s;                      // probability weights
    for (double& v : nodes) v *= std::sqrt(2.0);           // probabilists' scaling
}

/// MI of a +-a binary input in one real AWGN dimension with noise sigma,
/// in bits, by Gauss-Hermite quadrature.
inline double binary_awgn_mi(double a, double sigma, int n = 96) {
    std::vector<double> x, w;
    gauss_hermite(n, x, w);
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = -2.0 * a * (a + sigma * x[i]) / (sigma * sigma);
        const double soft = u > 0 ? (u + std::log1p(std::exp(-u))) / std::log(2.0)
                                  : std::log1p(std::exp(u)) / std::log(2.0);
        e += w[i] * soft;
    }
    return 1.0 - e;
}

/// Golden-section maximizer on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-7) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Random n x n orthogonal matrix (QR of a Gaussian matrix), row-major.
inline std::vector<double> random_rotation(int n, std::uint64_t seed) {
    mdmod::CounterRng rng(seed, 99);
    std::vector<double> q(n * n);
    for (double& v : q) v = rng.next_gaussian();
    // Gram-Schmidt on rows
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            double dot = 0.0;
            for (int k = 0; k < n; ++k) dot += q[i * n + k] * q[j * n + k];
            for (int k = 0; k < n; ++k) q[i * n + k] -= dot * q[j * n + k];
        }
        double norm = 0.0;
        for (int k = 0; k < n; ++k) norm += q[i * n + k] * q[i * n + k];
        norm = std::sqrt(norm);
        for (int k = 0; k < n; ++k) q[i * n + k] /= norm;
    }
    return q;
}

} // namespace oracle

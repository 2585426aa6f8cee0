#include <catch_amalgamated.hpp>

#include <cmath>

#include "mdmod/metrics.hpp"
#include "mdmod/qam.hpp"
#include "test_oracles.hpp"

using namespace mdmod;

namespace {
const EstimatorConfig kFast{2000, 42, false};

Constellation rotated(const Constellation& c, std::uint64_t seed) {
    const int n = c.dimension;
    auto q = oracle::random_rotation(n, seed);
    Constellation out = c;
    for (std::size_t i = 0; i < c.size; ++i)
        for (int r = 0; r < n; ++r) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += q[r * n + k] * c.points[i * n + k];
            out.points[i * n + r] = s;
        }
    return out;
}
} // namespace

TEST_CASE("MI saturates at log2 M in the noise-free limit") {
    for (int bits : {2, 3, 5}) {
        auto c = generate_qam(bits);
        auto e = mi_awgn(c, 60.0, kFast);
        CHECK(e.value == Catch::Approx(spectral_efficiency(c)).margin(0.01));
    }
}

TEST_CASE("MI vanishes in the noise-dominated limit") {
    auto e = mi_awgn(generate_qam(3), -40.0, kFast);
    CHECK(e.value < 0.05);
    CHECK(e.value > -0.01);
}

TEST_CASE("GMI equals m in the noise-free limit") {
    auto c = generate_qam(5);
    auto e = gmi_awgn(c, 60.0, kFast);
    CHECK(e.value == Catch::Approx(10.0).margin(0.01));
}

TEST_CASE("MI matches the binary-input quadrature oracle") {
    // 2-point antipodal format: one active real dimension per 2D slot
    Constellation bpsk;
    bpsk.dimension = 2;
    bpsk.size = 2;
    bpsk.points = {1, 0, -1, 0};
    bpsk.name = "bpsk";
    for (double snr_db : {-3.0, 0.0, 3.0, 6.0}) {
        const double sigma = std::sqrt(1.0 / (2.0 * std::pow(10.0, snr_db / 10.0)));
        const double exact = oracle::binary_awgn_mi(1.0, sigma);
        auto e = mi_awgn(bpsk, snr_db, {20000, 5, false});
        INFO("snr " << snr_db << " exact " << exact);
        CHECK(std::fabs(e.value / 2.0 - exact) <= 3.0 * e.std_error / 2.0 + 1e-4);
    }
}

TEST_CASE("Gray QPSK has GMI equal to MI") {
    auto c = generate_qam(2);
    for (double snr_db : {0.0, 5.0, 10.0}) {
        auto mi = mi_awgn(c, snr_db, kFast);
        auto gm = gmi_awgn(c, snr_db, kFast);
        CHECK(std::fabs(mi.value - gm.value) <= 3.0 * (mi.std_error + gm.std_error) + 1e-6);
    }
}

TEST_CASE("8QAM reaches the 0.8-rate point at its required SNR") {
    // table point: MI(7.502 dB) = 4.8 bit/4D at 1e6 total samples
    auto c = generate_qam(3);
    auto e = mi_awgn(c, 7.502, {125000, 2024, false});
    CHECK(std::fabs(e.value - 4.8) <= 3.0 * e.std_error + 0.004);
}

TEST_CASE("antithetic pairing keeps the estimate unbiased") {
    auto c = generate_qam(3);
    auto plain = mi_awgn(c, 7.5, {8000, 4, false});
    auto anti = mi_awgn(c, 7.5, {8000, 4, true});
    CHECK(std::fabs(plain.value - anti.value) <=
          3.0 * (plain.std_error + anti.std_error));
}

TEST_CASE("determinism: identical inputs give bit-identical estimates") {
    auto c = generate_qam(3);
    auto a = mi_awgn(c, 7.5, {4000, 123, false});
    auto b = mi_awgn(c, 7.5, {4000, 123, false});
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    auto g1 = gmi_awgn(c, 7.5, {4000, 123, true});
    auto g2 = gmi_awgn(c, 7.5, {4000, 123, true});
    CHECK(g1.value == g2.value);
}

TEST_CASE("estimates are independent of the worker count") {
    auto c = generate_qam(4);
    setenv("MDMOD_THREADS", "1", 1);
    auto one = mi_awgn(c, 9.0, {3000, 7, false});
    setenv("MDMOD_THREADS", "4", 1);
    auto four = mi_awgn(c, 9.0, {3000, 7, false});
    unsetenv("MDMOD_THREADS");
    CHECK(one.value == four.value);
    CHECK(one.std_error == four.std_error);
}

TEST_CASE("std_error shrinks like 1/sqrt(samples)") {
    auto c = generate_qam(3);
    auto small = mi_awgn(c, 7.5, {4000, 9, false});
    auto big = mi_awgn(c, 7.5, {16000, 9, false});
    const double ratio = big.std_error / small.std_error;
    CHECK(ratio == Catch::Approx(0.5).margin(0.125));
}

TEST_CASE("MI is nondecreasing in SNR up to statistical slack") {
    auto c = generate_qam(4);
    double prev = -1.0, prev_err = 0.0;
    for (double snr = 0.0; snr <= 14.0; snr += 0.5) {
        auto e = mi_awgn(c, snr, kFast);
        CHECK(e.value >= prev - 3.0 * (e.std_error + prev_err));
        prev = e.value;
        prev_err = e.std_error;
    }
}

TEST_CASE("MI is rotation invariant") {
    auto c = cartesian_square(generate_qam(2));
    auto base = mi_awgn(c, 6.0, {4000, 21, false});
    for (std::uint64_t seed : {11ull, 22ull}) {
        auto r = rotated(c, seed);
        auto e = mi_awgn(r, 6.0, {4000, 21, false});
        CHECK(std::fabs(e.value - base.value) <= 3.0 * (e.std_error + base.std_error) + 1e-6);
    }
}

TEST_CASE("label permutation changes GMI but not MI") {
    auto c = generate_qam(4);
    Constellation shuffled = c;
    // deterministic random relabeling (Fisher-Yates)
    CounterRng rng(31337, 0);
    for (std::size_t i = shuffled.labels->size(); i > 1; --i)
        std::swap((*shuffled.labels)[i - 1], (*shuffled.labels)[rng.next_u64() % i]);

    auto mi_a = mi_awgn(c, 10.0, kFast);
    auto mi_b = mi_awgn(shuffled, 10.0, kFast);
    CHECK(std::fabs(mi_a.value - mi_b.value) <= 1e-12);  // labels don't enter MI

    auto gmi_gray = gmi_awgn(c, 10.0, kFast);
    auto gmi_bad = gmi_awgn(shuffled, 10.0, kFast);
    CHECK(gmi_gray.value > gmi_bad.value);
}

TEST_CASE("GMI never exceeds MI") {
    for (int bits : {3, 4, 5}) {
        auto c = generate_qam(bits);
        for (double snr : {2.0, 8.0, 14.0}) {
            auto mi = mi_awgn(c, snr, kFast);
            auto gm = gmi_awgn(c, snr, kFast);
            CHECK(gm.value <= mi.value + 3.0 * (mi.std_error + gm.std_error));
        }
    }
}

TEST_CASE("PM format carries twice the per-2D information") {
    auto c2 = generate_qam(3);
    auto c4 = cartesian_square(c2);
    auto e2 = mi_awgn(c2, 8.0, {8000, 3, false});
    auto e4 = mi_awgn(c4, 8.0, {2000, 3, false});
    // both are in bit/4D, so the values must agree
    CHECK(std::fabs(e2.value - e4.value) <= 3.0 * (e2.std_error + e4.std_error));
}

TEST_CASE("nmi and ngmi normalize by the spectral efficiency") {
    auto c = generate_qam(3);
    auto e = mi_awgn(c, 60.0, kFast);
    CHECK(nmi(e, c) == Catch::Approx(1.0).margin(0.002));
    auto g = gmi_awgn(c, 60.0, kFast);
    CHECK(ngmi(g, c) == Catch::Approx(1.0).margin(0.002));

    SECTION("handcrafted values") {
        MetricEstimate fake;
        fake.kind = MetricKind::mi;
        fake.value = 4.8;
        fake.source_name = c.name;
        fake.source_dimension = c.dimension;
        fake.source_size = c.size;
        CHECK(nmi(fake, c) == Catch::Approx(0.8));
        fake.value = 0.0;
        CHECK(nmi(fake, c) == Catch::Approx(0.0));
    }
    SECTION("mismatched constellation is rejected") {
        auto other = generate_qam(4);
        CHECK_THROWS_WITH(nmi(e, other), Catch::Matchers::ContainsSubstring("different"));
        CHECK_THROWS_AS(ngmi(e, c), domain_error);  // wrong kind
    }
}

TEST_CASE("error paths") {
    auto c = generate_qam(3);
    SECTION("unnormalized input") {
        Constellation bad = c;
        for (double& v : bad.points) v *= 2.0;
        CHECK_THROWS_WITH(mi_awgn(bad, 10.0, kFast),
                          Catch::Matchers::ContainsSubstring("normalized"));
    }
    SECTION("GMI requires labels") {
        Constellation unlabeled = c;
        unlabeled.labels.reset();
        CHECK_THROWS_WITH(gmi_awgn(unlabeled, 10.0, kFast),
                          Catch::Matchers::ContainsSubstring("GMI requires labels"));
    }
    SECTION("sample budget overflow guard") {
        EstimatorConfig huge{std::int64_t{1} << 45, 1, false};
        CHECK_THROWS_AS(mi_awgn(c, 10.0, huge), domain_error);
    }
    SECTION("non-finite SNR") {
        CHECK_THROWS_AS(mi_awgn(c, std::nan(""), kFast), domain_error);
    }
}

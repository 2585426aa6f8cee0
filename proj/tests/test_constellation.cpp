#include <catch_amalgamated.hpp>

#include <bit>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mdmod/constellation.hpp"
#include "mdmod/io.hpp"
#include "mdmod/qam.hpp"
#include "mdmod/rng.hpp"

using namespace mdmod;
namespace fs = std::filesystem;

namespace {
Constellation qpsk() { return generate_qam(2); }

fs::path temp_file(const char* name) {
    return fs::temp_directory_path() / name;
}
} // namespace

TEST_CASE("spectral efficiency is (4/N) log2 M") {
    CHECK(spectral_efficiency(generate_qam(3)) == Catch::Approx(6.0));
    CHECK(spectral_efficiency(cartesian_square(generate_qam(3))) == Catch::Approx(6.0));
    Constellation c;
    c.dimension = 4;
    c.size = 16;
    c.points.assign(64, 0.25);
    CHECK(spectral_efficiency(c) == Catch::Approx(4.0));
    CHECK(spectral_efficiency(generate_qam(5)) == Catch::Approx(10.0));
}

TEST_CASE("normalize scales to unit energy per 2D slot") {
    Constellation raw;
    raw.dimension = 2;
    raw.size = 4;
    raw.points = {1, 1, 1, -1, -1, 1, -1, -1};
    auto n = normalize(raw);
    CHECK(n.mean_energy_per_slot() == Catch::Approx(1.0).margin(1e-12));
    CHECK(n.points[0] == Catch::Approx(1.0 / std::sqrt(2.0)));

    SECTION("idempotent") {
        auto nn = normalize(n);
        for (std::size_t i = 0; i < n.points.size(); ++i)
            CHECK(nn.points[i] == Catch::Approx(n.points[i]).margin(1e-15));
    }
    SECTION("16QAM scale is 1/sqrt(10)") {
        Constellation q;
        q.dimension = 2;
        q.size = 16;
        for (int a : {-3, -1, 1, 3})
            for (int b : {-3, -1, 1, 3}) {
                q.points.push_back(a);
                q.points.push_back(b);
            }
        auto qn = normalize(q);
        CHECK(qn.points[0] == Catch::Approx(-3.0 / std::sqrt(10.0)));
    }
    SECTION("degenerate constellation rejected") {
        Constellation z;
        z.dimension = 2;
        z.size = 2;
        z.points = {0, 0, 0, 0};
        CHECK_THROWS_WITH(normalize(z), Catch::Matchers::ContainsSubstring("degenerate"));
    }
}

TEST_CASE("QAM generator") {
    SECTION("QPSK is constant modulus") {
        CHECK(moments(qpsk()).excess_kurtosis == Catch::Approx(-1.0).margin(1e-12));
    }
    SECTION("16QAM kurtosis") {
        CHECK(moments(generate_qam(4)).excess_kurtosis == Catch::Approx(-0.68).margin(1e-12));
    }
    SECTION("32QAM has m = 10") {
        auto c = generate_qam(5);
        CHECK(c.size == 32);
        CHECK(spectral_efficiency(c) == Catch::Approx(10.0));
    }
    SECTION("sizes and normalization for all supported bit counts") {
        for (int bits : {1, 2, 3, 4, 5, 6, 8}) {
            auto c = generate_qam(bits);
            CHECK(c.size == (std::size_t{1} << bits));
            CHECK(c.is_normalized());
            REQUIRE(c.labels.has_value());
            validate(c);
        }
    }
    SECTION("unsupported sizes") {
        CHECK_THROWS_AS(generate_qam(0), domain_error);
        CHECK_THROWS_AS(generate_qam(7), domain_error);
        CHECK_THROWS_AS(generate_qam(9), domain_error);
    }
}

TEST_CASE("Gray labels differ in one bit between adjacent square-QAM points") {
    for (int bits : {2, 4, 6}) {
        auto c = generate_qam(bits);
        const double step = std::fabs(c.points[1] - c.points[3]);  // grid pitch
        for (std::size_t i = 0; i < c.size; ++i) {
            for (std::size_t j = i + 1; j < c.size; ++j) {
                const double dx = c.points[i * 2] - c.points[j * 2];
                const double dy = c.points[i * 2 + 1] - c.points[j * 2 + 1];
                const double d2 = dx * dx + dy * dy;
                if (std::fabs(d2 - step * step) < 1e-9) {  // nearest neighbors
                    const auto x = (*c.labels)[i] ^ (*c.labels)[j];
                    CHECK(std::popcount(x) == 1);
                }
            }
        }
    }
}

TEST_CASE("cartesian_square builds PM formats") {
    auto c = cartesian_square(generate_qam(3));
    CHECK(c.dimension == 4);
    CHECK(c.size == 64);
    CHECK(spectral_efficiency(c) == Catch::Approx(6.0));
    CHECK(c.is_normalized(1e-9));
    validate(c);

    SECTION("per-slot kurtosis is preserved") {
        CHECK(moments(c).excess_kurtosis ==
              Catch::Approx(moments(generate_qam(3)).excess_kurtosis).margin(1e-12));
    }
    SECTION("cross energy of independent slots is mu2 squared") {
        auto ms = moments(c);
        REQUIRE(ms.cross_energy.has_value());
        CHECK(*ms.cross_energy == Catch::Approx(ms.mu2 * ms.mu2).margin(1e-12));
    }
    SECTION("commutes with normalize") {
        Constellation raw;
        raw.dimension = 2;
        raw.size = 2;
        raw.points = {3, 0, -3, 0};
        raw.labels = std::vector<std::uint32_t>{0, 1};
        auto a = normalize(cartesian_square(normalize(raw)));
        auto b = normalize(cartesian_square(raw));
        for (std::size_t i = 0; i < a.points.size(); ++i)
            CHECK(a.points[i] == Catch::Approx(b.points[i]).margin(1e-12));
    }
    SECTION("rejects non-2D input") {
        CHECK_THROWS_AS(cartesian_square(c), domain_error);
    }
}

TEST_CASE("scale invariance of SE and kurtosis") {
    CounterRng rng(2024, 0);
    auto c = generate_qam(4);
    const double m0 = spectral_efficiency(c);
    const double phi0 = moments(c).excess_kurtosis;
    for (int trial = 0; trial < 20; ++trial) {
        const double s = 0.1 + 9.9 * rng.next_unit();
        Constellation scaled = c;
        for (double& v : scaled.points) v *= s;
        CHECK(spectral_efficiency(scaled) == Catch::Approx(m0));
        CHECK(moments(normalize(scaled)).excess_kurtosis == Catch::Approx(phi0).margin(1e-12));
    }
}

TEST_CASE("moment inequalities") {
    for (int bits : {1, 2, 3, 4, 5, 6}) {
        auto ms = moments(generate_qam(bits));
        CHECK(ms.mu2 > 0.0);
        CHECK(ms.mu4 >= ms.mu2 * ms.mu2 - 1e-12);  // Cauchy-Schwarz
        CHECK(ms.excess_kurtosis >= -1.0 - 1e-12);
    }
}

TEST_CASE("moments of a Gaussian cloud have vanishing excess kurtosis") {
    CounterRng rng(7, 1);
    const int k = 200000;
    Constellation c;
    c.dimension = 2;
    c.size = k;
    c.points.resize(2 * k);
    for (double& v : c.points) v = rng.next_gaussian();
    auto ms = moments(normalize(c));
    CHECK(std::fabs(ms.excess_kurtosis) < 3.0 / std::sqrt(static_cast<double>(k)) * 3.0);
}

TEST_CASE("constellation file round trip") {
    auto path = temp_file("mdmod_roundtrip.txt");
    auto c = generate_qam(2);
    store_constellation(c, path.string());
    double scale = 0.0;
    auto back = load_constellation(path.string(), &scale);
    REQUIRE(back.size == c.size);
    REQUIRE(back.dimension == c.dimension);
    CHECK(scale == Catch::Approx(1.0).margin(1e-12));  // stored normalized
    for (std::size_t i = 0; i < c.points.size(); ++i)
        CHECK(back.points[i] == Catch::Approx(c.points[i]).margin(1e-14));
    REQUIRE(back.labels.has_value());
    CHECK(*back.labels == *c.labels);
    fs::remove(path);
}

TEST_CASE("constellation parser reports offending lines") {
    auto path = temp_file("mdmod_bad.txt");
    auto write = [&](const char* text) {
        std::ofstream out(path);
        out << text;
    };

    SECTION("malformed header") {
        write("not a header\n");
        CHECK_THROWS_WITH(load_constellation(path.string()),
                          Catch::Matchers::ContainsSubstring("malformed header"));
    }
    SECTION("wrong coordinate count") {
        write("2 2\nunlabeled\n1 0\n0\n");
        CHECK_THROWS_WITH(load_constellation(path.string()),
                          Catch::Matchers::ContainsSubstring(":4:"));
    }
    SECTION("duplicate label names the line") {
        write("2 2\nlabeled\n0 1 0\n0 -1 0\n");
        CHECK_THROWS_WITH(load_constellation(path.string()),
                          Catch::Matchers::ContainsSubstring("duplicate label"));
    }
    SECTION("labeled size must be a power of two") {
        write("2 3\nlabeled\n00 1 0\n01 -1 0\n10 0 1\n");
        CHECK_THROWS_WITH(load_constellation(path.string()),
                          Catch::Matchers::ContainsSubstring("power of two"));
    }
    SECTION("comments and blank lines are ignored") {
        write("# comment\n\n2 2  # trailing\nunlabeled\n1 0\n-1 0\n");
        auto c = load_constellation(path.string());
        CHECK(c.size == 2);
    }
    fs::remove(path);
}

TEST_CASE("shipped corpus files load") {
    const char* root = std::getenv("MDMOD_CORPUS");
    REQUIRE(root != nullptr);
    auto ring = load_constellation(std::string(root) + "/constellations/ring2-8.txt");
    CHECK(ring.size == 8);
    CHECK(ring.dimension == 2);
    auto d4c = load_constellation(std::string(root) + "/constellations/d4cut-64.txt");
    CHECK(d4c.size == 64);
    CHECK(d4c.dimension == 4);
    CHECK(spectral_efficiency(d4c) == Catch::Approx(6.0));
    // the cut is symmetric, so the mean is zero
    double mean = 0.0;
    for (double v : d4c.points) mean += v;
    CHECK(std::fabs(mean) < 1e-12);
}

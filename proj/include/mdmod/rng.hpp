#pragma once

#include <cmath>
#include <cstdint>

namespace mdmod {

/// Counter-based stream RNG (SplitMix64 finalizer over a keyed counter).
/// Streams derived from (seed, stream) are independent and reproducible
/// regardless of evaluation order or worker count.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ULL))), ctr_(0) {}

    std::uint64_t next_u64() { return mix(key_ + (++ctr_) * 0x9E3779B97F4A7C15ULL); }

    /// Uniform in (0, 1].
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; draws are consumed in pairs.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace mdmod

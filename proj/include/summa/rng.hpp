#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace summa {

/// Counter-based generator: the i-th draw is a pure function of (key, i).
///
/// The mixing function is the SplitMix64 finalizer. Streams are derived
/// from a root seed plus integer tags, so a restart's draws never depend on
/// how many other restarts ran before it.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) noexcept : key_(mix(key)) {}

    /// Independent stream for (seed, tags...).
    static CounterRng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) noexcept {
        std::uint64_t k = mix(seed ^ 0x5851f42d4c957f2dULL);
        for (auto t : tags) {
            k = mix(k ^ mix(t + 0x9e3779b97f4a7c15ULL));
        }
        return CounterRng(k);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (no cached second value, so every
    /// call consumes exactly two counters).
    double normal() noexcept {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 < 1e-300) {
            u1 = 1e-300;
        }
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Rademacher sign.
    double sign() noexcept { return ((*this)() >> 63) != 0U ? -1.0 : 1.0; }

    std::uint64_t counter() const noexcept { return counter_; }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace summa

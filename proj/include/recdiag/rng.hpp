#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace recdiag {

/// Deterministic random source shared by all stochastic components.
///
/// The raw stream is std::mt19937_64, whose output sequence is fixed by the
/// standard, and every derived draw (bounded integers, uniforms, shuffles)
/// is built from that stream with explicit integer arithmetic rather than
/// the implementation-defined standard distributions. Changing the
/// generator or any derivation below is a breaking change for every
/// seed-dependent output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, bound) via rejection sampling.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal deviate (Box-Muller, pairs cached).
    double gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    /// Laplace (double exponential) deviate with given location and scale.
    double laplace(double location, double scale) {
        double u = uniform();
        while (u == 0.0) u = uniform();  // keeps 1 - 2|u - 1/2| strictly positive
        const double centered = u - 0.5;
        const double sign = centered < 0.0 ? -1.0 : 1.0;
        return location - scale * sign * std::log(1.0 - 2.0 * std::abs(centered));
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    std::mt19937_64 gen_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace recdiag

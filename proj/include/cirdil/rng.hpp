#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace cirdil {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// 64-bit FNV-1a over raw bytes.
inline constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                       std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Derives an independent child seed for a named stage.
inline constexpr std::uint64_t fork_seed(std::uint64_t seed, std::string_view stage) noexcept {
    return splitmix64_mix(seed ^ splitmix64_mix(fnv1a64(stage)));
}

// SplitMix64 generator. All range reductions are implemented here rather than with
// <random> distributions, whose output is not specified bit-exactly across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(state_);
    }

    // Uniform in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform in [lo, hi], inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
        if (hi <= lo) return lo;
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double unit() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool chance(double p) noexcept { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& items) noexcept {
        return items[static_cast<std::size_t>(below(items.size()))];
    }

private:
    std::uint64_t state_;
};

// Discrete sampler over a fixed weight table (inverse CDF, binary search).
class WeightedSampler {
public:
    WeightedSampler() = default;

    explicit WeightedSampler(const std::vector<double>& weights) {
        cumulative_.reserve(weights.size());
        double acc = 0.0;
        for (double w : weights) {
            acc += w;
            cumulative_.push_back(acc);
        }
    }

    // Zipf-like weights 1/(rank+1)^exponent for n items.
    static WeightedSampler zipf(std::size_t n, double exponent) {
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
        return WeightedSampler(w);
    }

    std::size_t operator()(Rng& rng) const noexcept {
        const double target = rng.unit() * cumulative_.back();
        std::size_t lo = 0;
        std::size_t hi = cumulative_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cumulative_[mid] > target) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        return lo;
    }

    std::size_t size() const noexcept { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
};

}  // namespace cirdil


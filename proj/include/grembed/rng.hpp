#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace grembed::num {

// SplitMix64 finalizer; used for seeding and for deriving sub-stream seeds.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Mixes a parent seed with a stream index into an independent child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Mixes a parent seed with a label (FNV-1a over the bytes, then SplitMix64).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;

/// Deterministic random stream backed by xoshiro256** (Blackman & Vigna),
/// state expanded from the 64-bit seed with SplitMix64. Every derived draw
/// (reals, ranges, Gaussians, shuffles) is implemented here so streams are
/// identical across standard libraries and platforms.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;

    // Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) noexcept;

    // Uniform integer in [0, bound); bound must be > 0. Unbiased (Lemire).
    std::uint64_t below(std::uint64_t bound) noexcept;

    // Standard normal via Box-Muller; caches the second variate.
    double gaussian() noexcept;

    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept { return next_u64(); }

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace grembed::num

#pragma once

#include <cstdint>

namespace frtcd {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive a child key from (key, index). Used to give every draw, rep and
/// experiment its own independent stream.
constexpr std::uint64_t derive_seed(std::uint64_t key, std::uint64_t index) noexcept {
    return mix64(mix64(key) ^ mix64(index * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
}

/// Counter-based generator: output k of stream (seed, stream) is a pure
/// function of (seed, stream, k). Cheap to construct, so one instance per
/// draw is the intended use.
class counter_rng {
   public:
    using result_type = std::uint64_t;

    counter_rng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(derive_seed(seed, stream)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform on [0, bound) without modulo bias (Lemire's method with rejection).
    std::uint64_t uniform_below(std::uint64_t bound) noexcept;

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform01() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via inverse-CDF of uniform01(); portable across platforms.
    double normal() noexcept;

   private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace frtcd

#ifndef DSRISK_COUNTER_RNG_HPP
#define DSRISK_COUNTER_RNG_HPP

#include <cstdint>

namespace dsrisk {

/// Counter-based generator: output n of stream s under seed k is a pure
/// function of (k, s, n), so trials can be evaluated in any order or on any
/// thread and still see the same numbers. SplitMix64 finalizer over a keyed
/// Weyl sequence.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix(seed ^ mix(stream + kWeyl))) {}

    std::uint64_t next() noexcept { return mix(key_ + kWeyl * ++counter_); }

    /// Uniform double in the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kWeyl = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace dsrisk

#endif  // DSRISK_COUNTER_RNG_HPP

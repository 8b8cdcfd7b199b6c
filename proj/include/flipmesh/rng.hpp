#pragma once

#include <cstdint>

namespace flipmesh {

/// Counter-based generator: every draw is a pure function of (seed, stream, index),
/// so generated fixtures are identical on every platform and independent of call order.
class CounterRng
{
public:
    constexpr explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))))
    {}

    constexpr std::uint64_t bits(std::uint64_t index) const noexcept
    {
        return mix(key_ + 0x9e3779b97f4a7c15ULL * (index + 1));
    }

    /// Uniform in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t index) const noexcept
    {
        return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    constexpr double uniform(std::uint64_t index, double lo, double hi) const noexcept
    {
        return lo + (hi - lo) * uniform(index);
    }

private:
    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
};

} // namespace flipmesh

#pragma once

#include <cstdint>
#include <random>

namespace blursynth {

/// splitmix64 finalizer: a bijective 64-bit mix.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for one sample: splitmix64(splitmix64(splitmix64(master) ^ image) ^ sample).
constexpr std::uint64_t sample_seed(std::uint64_t master, std::uint64_t image_index,
                                    std::uint64_t sample_index) noexcept
{
    return splitmix64(splitmix64(splitmix64(master) ^ image_index) ^ sample_index);
}

/// Derive an independent sub-seed (e.g. for a resampling attempt).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept
{
    return splitmix64(seed ^ splitmix64(salt + 0x5851F42D4C957F2DULL));
}

/// Seeded random source. The engine (mt19937_64) is fully specified by the
/// standard, and all distributions are implemented here rather than through
/// <random>'s implementation-defined ones, so draws are identical on every
/// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on the closed range [lo, hi]; one draw.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
    {
        const auto span = static_cast<double>(hi - lo + 1);
        auto v = lo + static_cast<std::int64_t>(uniform() * span);
        return v > hi ? hi : v;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace blursynth

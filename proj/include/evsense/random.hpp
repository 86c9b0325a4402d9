#pragma once

#include <cstdint>
#include <numbers>
#include <random>

namespace evsense {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream `stream` within the replication seeded by `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Stream ids used by the engine: 0 events, 1 initial placement, 2 + i agent i.
namespace streams {
inline constexpr std::uint64_t events = 0;
inline constexpr std::uint64_t placement = 1;
inline constexpr std::uint64_t agent_base = 2;
} // namespace streams

/// Seeded random stream. Conversions to real numbers are done here rather
/// than through <random> distributions so results do not depend on the
/// standard library implementation.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n)
    {
        // Lemire-style rejection keeps the result unbiased.
        const std::uint64_t limit = -n % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= limit)
                return r % n;
        }
    }

    double angle() { return uniform(0.0, 2.0 * std::numbers::pi); }

private:
    std::mt19937_64 engine_;
};

} // namespace evsense

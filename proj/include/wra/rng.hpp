#pragma once

#include <cstdint>

#include "wra/numeric.hpp"

namespace wra {

namespace detail {
/// splitmix64 finalizer (Steele/Lea/Flood). Stateless 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based generator: output k is a pure function of (seed, k), so
/// streams are reproducible across platforms and trivially splittable.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(detail::mix64(seed)) {}

    std::uint64_t next_u64() { return detail::mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

    /// Uniform double strictly inside (0,1): 53 mantissa bits plus a half-ulp
    /// offset, so quantile transforms never see 0 or 1.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return normal_quantile(next_uniform()); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Derives independent stream seeds, e.g. per (master, n, replication).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = detail::mix64(master);
    s = detail::mix64(s ^ (a * 0xD1B54A32D192ED03ULL));
    s = detail::mix64(s ^ (b * 0x8CB92BA72F3D8DD7ULL));
    return s;
}

}  // namespace wra

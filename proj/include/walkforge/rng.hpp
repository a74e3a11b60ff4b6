#pragma once

#include <cstdint>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

namespace walkforge {

using Int = boost::multiprecision::cpp_int;

// SplitMix64 finalizer (Steele et al.); used for seed derivation only,
// never inside the walk itself.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Per-walk / per-run seeds derived from a master seed by counter, so whole
// runs replay bit-identically from one 64-bit value.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(master ^ splitmix64(counter + 1));
}

// The starting randomization uses the 64-bit Mersenne twister; its output
// sequence is pinned by the standard, which keeps runs portable.
using Rng = std::mt19937_64;

// Uniform draw from [0, bound) by rejection. std::uniform_int_distribution is
// implementation-defined, so it cannot be used where replays must be exact.
inline std::uint64_t uniform_below_u64(Rng& rng, std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    for (;;) {
        const std::uint64_t v = rng();
        if (v < limit) return v % bound;
    }
}

// Same, for arbitrary-width bounds.
inline Int uniform_below(Rng& rng, const Int& bound) {
    if (bound <= 1) return 0;
    const std::size_t bits = msb(bound) + 1;  // bound >= 2 here
    const std::size_t words = (bits + 63) / 64;
    const std::size_t top_bits = bits - 64 * (words - 1);
    const std::uint64_t top_mask =
        top_bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << top_bits) - 1);
    for (;;) {
        Int v = 0;
        for (std::size_t i = 0; i < words; ++i) {
            std::uint64_t w = rng();
            if (i + 1 == words) w &= top_mask;
            v |= Int(w) << (64 * i);
        }
        if (v < bound) return v;
    }
}

}  // namespace walkforge

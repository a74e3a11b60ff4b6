#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace walkforge {

// Wang's 64 -> 32 bit hash pipeline, kept as the full 64-bit word so the
// distinguisher can use the bits the partition function does not.
// All shifts are logical, arithmetic wraps mod 2^64.
inline std::uint64_t wang64(std::uint64_t k) {
    k = (~k) + (k << 18);
    k ^= k >> 31;
    k *= 21;
    k ^= k >> 11;
    k += k << 6;
    k ^= k >> 22;
    return k;
}

inline std::uint32_t hash64to32(std::uint64_t k) {
    return static_cast<std::uint32_t>(wang64(k));
}

constexpr std::uint64_t kFoldMult = 0x9E3779B97F4A7C15ull;

// Second-round constant: the partition function reads round one, the
// distinguished-point predicate reads round two, so the two look independent.
constexpr std::uint64_t kDistinguisherTweak = 0xC2B2AE3D27D4EB4Full;

// Folds a canonical encoding into one 64-bit key: little-endian 8-byte
// blocks (last block zero-padded), acc = (acc ^ block) * kFoldMult.
// The salt seeds the chain; changing it permutes hashes without touching
// any group arithmetic.
struct ByteFolder {
    std::uint64_t acc;
    std::uint64_t block = 0;
    unsigned filled = 0;

    explicit ByteFolder(std::uint64_t salt = 0) : acc(salt) {}

    void push_byte(std::uint8_t b) {
        block |= std::uint64_t{b} << (8 * filled);
        if (++filled == 8) flush();
    }

    void push_u64(std::uint64_t w) {
        if (filled == 0) {
            block = w;
            filled = 8;
            flush();
        } else {
            for (int i = 0; i < 8; ++i) push_byte(static_cast<std::uint8_t>(w >> (8 * i)));
        }
    }

    std::uint64_t finish() {
        if (filled != 0) flush();
        return acc;
    }

private:
    void flush() {
        acc = (acc ^ block) * kFoldMult;
        block = 0;
        filled = 0;
    }
};

inline std::uint64_t fold_bytes(std::span<const std::uint8_t> data, std::uint64_t salt = 0) {
    ByteFolder f(salt);
    for (std::uint8_t b : data) f.push_byte(b);
    return f.finish();
}

// node hash = low 32 bits of round one.
inline std::uint32_t node_hash_from_key(std::uint64_t key64) {
    return static_cast<std::uint32_t>(wang64(key64));
}

// distinguisher value = high 32 bits of round two.
inline std::uint32_t distinguisher_from_key(std::uint64_t key64) {
    return static_cast<std::uint32_t>(wang64(wang64(key64) ^ kDistinguisherTweak) >> 32);
}

}  // namespace walkforge

#pragma once

// Seeded hash functions mapping keys to blocks and to threshold values.
// Both derive from one 64-bit finalizer applied to (role-mixed seed, key);
// range reduction is multiply-shift, which stays unbiased for ranges that
// are not powers of two and avoids the division.

#include <cstdint>
#include <type_traits>

#include "slick/core.hpp"

namespace slick {

// splitmix64 finalizer: full avalanche on 64 bits.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t hashBits(std::uint64_t bits, std::uint64_t seed) {
    return mix64(bits ^ mix64(seed));
}

// Fixed-point scaling of a 64-bit hash into 0..range-1.
inline std::uint64_t reduceToRange(std::uint64_t h, std::uint64_t range) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(h) * static_cast<unsigned __int128>(range)) >> 64);
}

// Key -> 64-bit digest fed to the seeded mixer. Specialize for key types
// that are not integers.
template <class Key>
struct KeyBits {
    static_assert(std::is_integral_v<Key>,
                  "specialize slick::KeyBits for non-integral key types");
    std::uint64_t operator()(const Key& k) const { return static_cast<std::uint64_t>(k); }
};

inline constexpr std::uint64_t kBlockRole = 0xa24baed4963ee407ull;
inline constexpr std::uint64_t kThresholdRole = 0x5ab1f44c1a7b9c71ull;

template <class Key, class Bits = KeyBits<Key>>
class SeededHasher {
public:
    SeededHasher() = default;
    SeededHasher(std::size_t numBlocks, std::uint32_t thresholdRange,
                 std::uint64_t hashSeed, std::uint64_t thresholdSeed)
        : numBlocks_(numBlocks), thresholdRange_(thresholdRange),
          hashSeed_(hashSeed ^ kBlockRole), thresholdSeed_(thresholdSeed ^ kThresholdRole) {
        assert(numBlocks_ >= 1 && thresholdRange_ >= 1);
    }
    explicit SeededHasher(const SlickConfig& cfg)
        : SeededHasher(cfg.numBlocks(), static_cast<std::uint32_t>(cfg.thresholdRange),
                       cfg.hashSeed, cfg.thresholdSeed) {}

    std::size_t blockOf(const Key& k) const {
        return static_cast<std::size_t>(
            reduceToRange(hashBits(Bits{}(k), hashSeed_), numBlocks_));
    }
    std::uint32_t thresholdOf(const Key& k) const {
        return static_cast<std::uint32_t>(
            reduceToRange(hashBits(Bits{}(k), thresholdSeed_), thresholdRange_));
    }

    std::size_t numBlocks() const { return numBlocks_; }
    std::uint32_t thresholdRange() const { return thresholdRange_; }

private:
    std::size_t numBlocks_ = 1;
    std::uint32_t thresholdRange_ = 1;
    std::uint64_t hashSeed_ = kBlockRole;
    std::uint64_t thresholdSeed_ = kThresholdRole;
};

} // namespace slick

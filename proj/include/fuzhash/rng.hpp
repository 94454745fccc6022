#ifndef FUZHASH_RNG_HPP
#define FUZHASH_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

#include "fuzhash/bits.hpp"

namespace fuzhash {

/// splitmix64 step; used to derive independent stream seeds from one
/// master seed so that train/test/baseline draws never alias.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Stream ids of the experiment lifecycle.
enum class RngStream : uint64_t {
    WEIGHT_INIT = 1,
    TRAIN_DATA = 2,
    TEST_DATA = 3,
    BASELINE = 4,
};

/// Derives a deterministic per-stream generator from the master seed.
inline std::mt19937_64 derive_rng(uint64_t master_seed, RngStream stream) {
    uint64_t s = master_seed ^ (0xa5a5a5a5a5a5a5a5ull * static_cast<uint64_t>(stream));
    uint64_t a = splitmix64(s);
    uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
                      static_cast<uint32_t>(b), static_cast<uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

/// i.i.d. uniform bits.
inline BitVector random_bits(std::mt19937_64& rng, std::size_t n) {
    BitVector out(n);
    std::size_t i = 0;
    while (i < n) {
        uint64_t word = rng();
        for (int j = 0; j < 64 && i < n; ++j, ++i) out[i] = (word >> j) & 1u;
    }
    return out;
}

}  // namespace fuzhash

#endif

#ifndef FUZHASH_HASH_BINARY_HPP
#define FUZHASH_HASH_BINARY_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fuzhash/bits.hpp"
#include "fuzhash/hashspec.hpp"

namespace fuzhash {

// --- padding (shared by the binary and fuzzy paths) ---

/// Bits appended after an arbitrary-bit-length message for the MD/SHA
/// family: a single 1 bit, zeros to 448 mod 512, then the 64-bit message
/// length (little-endian byte order for MD5, big-endian for SHA1/SHA2).
/// For byte-aligned messages the 1 bit lands at the top of a fresh byte
/// (the standard 0x80); for odd bit lengths it is placed at the next bit
/// index of this artifact's LSB-first convention.
inline BitVector md_padding_tail(std::size_t msg_len, bool length_little_endian) {
    BitVector tail;
    if (msg_len % 8 == 0) {
        for (int i = 0; i < 7; ++i) tail.push_back(0);
        tail.push_back(1);
    } else {
        tail.push_back(1);
    }
    while ((msg_len + tail.size()) % 512 != 448) tail.push_back(0);
    uint64_t len = msg_len;
    for (int byte = 0; byte < 8; ++byte) {
        int shift = length_little_endian ? 8 * byte : 8 * (7 - byte);
        uint8_t b = static_cast<uint8_t>(len >> shift);
        for (int i = 0; i < 8; ++i) tail.push_back((b >> i) & 1u);
    }
    return tail;
}

inline BitVector pad_md(const BitVector& msg, bool length_little_endian) {
    BitVector out = msg;
    out.append(md_padding_tail(msg.size(), length_little_endian));
    return out;
}

/// Keccak pad10*1 with a configurable domain separator. The low bits of
/// domain_byte up to and including its highest set bit encode the suffix
/// plus the first pad bit (0x06 = SHA3's "01" suffix, 0x01 = original
/// Keccak, no suffix).
inline BitVector keccak_padding_tail(std::size_t msg_len, int rate, uint8_t domain_byte) {
    if (rate < 8 || rate % 8 != 0) throw std::invalid_argument("pad_keccak: invalid rate");
    if (domain_byte == 0) domain_byte = 0x01;
    BitVector tail;
    int top = 7;
    while (((domain_byte >> top) & 1u) == 0) --top;
    for (int i = 0; i <= top; ++i) tail.push_back((domain_byte >> i) & 1u);
    while ((msg_len + tail.size() + 1) % rate != 0) tail.push_back(0);
    tail.push_back(1);
    return tail;
}

inline BitVector pad_keccak(const BitVector& msg, int rate, uint8_t domain_byte) {
    BitVector out = msg;
    out.append(keccak_padding_tail(msg.size(), rate, domain_byte));
    return out;
}

// --- word/bit helpers ---

inline uint32_t rotl32(uint32_t x, int n) { return (x << n) | (x >> (32 - n)); }
inline uint32_t rotr32(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

inline uint32_t bits_to_u32le(const BitVector& b, std::size_t off) {
    uint32_t w = 0;
    for (int i = 0; i < 32; ++i) w |= static_cast<uint32_t>(b[off + i]) << i;
    return w;
}
inline uint32_t bits_to_u32be(const BitVector& b, std::size_t off) {
    // big-endian word from 4 bytes, each byte LSB-first in bit space
    uint32_t w = 0;
    for (int byte = 0; byte < 4; ++byte)
        for (int i = 0; i < 8; ++i)
            w |= static_cast<uint32_t>(b[off + 8 * byte + i]) << (8 * (3 - byte) + i);
    return w;
}
inline void append_u32le(BitVector& out, uint32_t w) {
    for (int i = 0; i < 32; ++i) out.push_back((w >> i) & 1u);
}
inline void append_u32be(BitVector& out, uint32_t w) {
    for (int byte = 3; byte >= 0; --byte)
        for (int i = 0; i < 8; ++i) out.push_back((w >> (8 * byte + i)) & 1u);
}

// --- standard constant tables ---

namespace tables {

inline const std::array<uint32_t, 64>& md5_k() {
    static const std::array<uint32_t, 64> k = {
        0xd76aa478, 0xe8c7b756, 0x242070db, 0xc1bdceee, 0xf57c0faf, 0x4787c62a, 0xa8304613,
        0xfd469501, 0x698098d8, 0x8b44f7af, 0xffff5bb1, 0x895cd7be, 0x6b901122, 0xfd987193,
        0xa679438e, 0x49b40821, 0xf61e2562, 0xc040b340, 0x265e5a51, 0xe9b6c7aa, 0xd62f105d,
        0x02441453, 0xd8a1e681, 0xe7d3fbc8, 0x21e1cde6, 0xc33707d6, 0xf4d50d87, 0x455a14ed,
        0xa9e3e905, 0xfcefa3f8, 0x676f02d9, 0x8d2a4c8a, 0xfffa3942, 0x8771f681, 0x6d9d6122,
        0xfde5380c, 0xa4beea44, 0x4bdecfa9, 0xf6bb4b60, 0xbebfbc70, 0x289b7ec6, 0xeaa127fa,
        0xd4ef3085, 0x04881d05, 0xd9d4d039, 0xe6db99e5, 0x1fa27cf8, 0xc4ac5665, 0xf4292244,
        0x432aff97, 0xab9423a7, 0xfc93a039, 0x655b59c3, 0x8f0ccc92, 0xffeff47d, 0x85845dd1,
        0x6fa87e4f, 0xfe2ce6e0, 0xa3014314, 0x4e0811a1, 0xf7537e82, 0xbd3af235, 0x2ad7d2bb,
        0xeb86d391};
    return k;
}

inline const std::array<int, 64>& md5_s() {
    static const std::array<int, 64> s = {
        7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22, 7, 12, 17, 22,
        5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20, 5, 9,  14, 20,
        4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23, 4, 11, 16, 23,
        6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21, 6, 10, 15, 21};
    return s;
}

inline const std::array<uint32_t, 4> md5_iv = {0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476};
inline const std::array<uint32_t, 5> sha1_iv = {0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476,
                                                0xc3d2e1f0};
inline const std::array<uint32_t, 4> sha1_k = {0x5a827999, 0x6ed9eba1, 0x8f1bbcdc, 0xca62c1d6};

inline const std::array<uint32_t, 8> sha256_iv = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                                  0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

inline const std::array<uint32_t, 64>& sha256_k() {
    static const std::array<uint32_t, 64> k = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2};
    return k;
}

/// rho rotation offsets (mod lane width) by lane linear index x + 5y,
/// generated from the t-walk in the Keccak reference.
inline std::array<int, 25> keccak_rho_offsets(int lane_bits) {
    std::array<int, 25> off{};
    off[0] = 0;
    int x = 1, y = 0;
    for (int t = 0; t < 24; ++t) {
        off[x + 5 * y] = ((t + 1) * (t + 2) / 2) % lane_bits;
        int nx = y, ny = (2 * x + 3 * y) % 5;
        x = nx;
        y = ny;
    }
    return off;
}

/// Round constants from the rc(t) LFSR, truncated to the lane width.
inline std::vector<uint64_t> keccak_round_constants(int lane_bits, int nrounds) {
    auto rc_bit = [](int t) -> int {
        t %= 255;
        if (t == 0) return 1;
        int r = 1;
        for (int i = 1; i <= t; ++i) {
            r <<= 1;
            if (r & 0x100) r ^= 0x171;
        }
        return r & 1;
    };
    int l = 0;
    while ((1 << l) < lane_bits) ++l;
    std::vector<uint64_t> rcs(nrounds, 0);
    for (int ir = 0; ir < nrounds; ++ir)
        for (int j = 0; j <= l; ++j)
            if (rc_bit(j + 7 * ir)) rcs[ir] |= uint64_t{1} << ((1 << j) - 1);
    return rcs;
}

}  // namespace tables

// --- Keccak-f permutation (binary) ---

/// In-place Keccak-f over 25 lanes of lane_bits (64 or 8). Applies the
/// steps present in step_mask in the canonical order theta, rho, pi, chi,
/// iota for rounds 0 .. nrounds-1.
inline void keccak_f_lanes(std::array<uint64_t, 25>& a, int lane_bits, int nrounds,
                           unsigned step_mask) {
    const uint64_t lane_mask =
        lane_bits == 64 ? ~uint64_t{0} : ((uint64_t{1} << lane_bits) - 1);
    auto rotl = [&](uint64_t x, int n) {
        n %= lane_bits;
        if (n == 0) return x & lane_mask;
        return ((x << n) | (x >> (lane_bits - n))) & lane_mask;
    };
    static thread_local std::array<int, 25> rho64 = tables::keccak_rho_offsets(64);
    static thread_local std::array<int, 25> rho8 = tables::keccak_rho_offsets(8);
    const auto& rho = lane_bits == 64 ? rho64 : rho8;
    auto rcs = tables::keccak_round_constants(lane_bits, nrounds);

    for (int ir = 0; ir < nrounds; ++ir) {
        if (step_mask & STEP_THETA) {
            uint64_t c[5], d[5];
            for (int x = 0; x < 5; ++x)
                c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
            for (int x = 0; x < 5; ++x) d[x] = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
            for (int i = 0; i < 25; ++i) a[i] ^= d[i % 5];
        }
        if (step_mask & STEP_RHO)
            for (int i = 0; i < 25; ++i) a[i] = rotl(a[i], rho[i]);
        if (step_mask & STEP_PI) {
            std::array<uint64_t, 25> b;
            for (int x = 0; x < 5; ++x)
                for (int y = 0; y < 5; ++y) b[x + 5 * y] = a[(x + 3 * y) % 5 + 5 * x];
            a = b;
        }
        if (step_mask & STEP_CHI) {
            std::array<uint64_t, 25> b = a;
            for (int y = 0; y < 5; ++y)
                for (int x = 0; x < 5; ++x)
                    a[x + 5 * y] =
                        b[x + 5 * y] ^ ((~b[(x + 1) % 5 + 5 * y] & lane_mask) & b[(x + 2) % 5 + 5 * y]);
        }
        if (step_mask & STEP_IOTA) a[0] ^= rcs[ir];
    }
}

/// Keccak-f on a bit-vector state (bit i = lane i/w, weight 2^(i mod w)).
inline BitVector keccak_f_binary(const BitVector& state, int nrounds, unsigned step_mask) {
    int width = static_cast<int>(state.size());
    if (width != 1600 && width != 200) throw std::invalid_argument("keccak_f: invalid state width");
    int w = width / 25;
    std::array<uint64_t, 25> lanes{};
    for (int i = 0; i < width; ++i)
        if (state[i]) lanes[i / w] |= uint64_t{1} << (i % w);
    keccak_f_lanes(lanes, w, nrounds, step_mask);
    BitVector out(width);
    for (int i = 0; i < width; ++i) out[i] = (lanes[i / w] >> (i % w)) & 1u;
    return out;
}

// --- exact digests ---

namespace detail {

inline uint32_t wadd(uint32_t a, uint32_t b, bool as_xor) { return as_xor ? (a ^ b) : (a + b); }

inline BitVector md5_binary(const HashSpec& spec, const BitVector& msg) {
    const auto& K = spec.constants_override && !spec.constants_override->round_constants.empty()
                        ? spec.constants_override->round_constants
                        : std::vector<uint32_t>(tables::md5_k().begin(), tables::md5_k().end());
    std::array<uint32_t, 4> h;
    if (spec.constants_override && !spec.constants_override->initial_state.empty()) {
        for (int i = 0; i < 4; ++i) h[i] = spec.constants_override->initial_state[i];
    } else {
        h = tables::md5_iv;
    }
    const bool x = spec.add_as_xor;
    BitVector padded = pad_md(msg, true);
    int rounds = spec.effective_rounds();
    for (std::size_t off = 0; off < padded.size(); off += 512) {
        uint32_t m[16];
        for (int i = 0; i < 16; ++i) m[i] = bits_to_u32le(padded, off + 32 * i);
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
        for (int i = 0; i < rounds; ++i) {
            uint32_t f;
            int g;
            if (i < 16) { f = (b & c) | (~b & d); g = i; }
            else if (i < 32) { f = (d & b) | (~d & c); g = (5 * i + 1) % 16; }
            else if (i < 48) { f = b ^ c ^ d; g = (3 * i + 5) % 16; }
            else { f = c ^ (b | ~d); g = (7 * i) % 16; }
            uint32_t t = wadd(wadd(wadd(a, f, x), K[i], x), m[g], x);
            a = d; d = c; c = b;
            b = wadd(b, rotl32(t, tables::md5_s()[i]), x);
        }
        if (spec.keep_feedforward) {
            h[0] = wadd(h[0], a, x); h[1] = wadd(h[1], b, x);
            h[2] = wadd(h[2], c, x); h[3] = wadd(h[3], d, x);
        } else {
            h = {a, b, c, d};
        }
    }
    BitVector out;
    for (uint32_t w : h) append_u32le(out, w);
    return out;
}

inline BitVector sha1_binary(const HashSpec& spec, const BitVector& msg) {
    std::array<uint32_t, 5> h;
    if (spec.constants_override && !spec.constants_override->initial_state.empty()) {
        for (int i = 0; i < 5; ++i) h[i] = spec.constants_override->initial_state[i];
    } else {
        h = tables::sha1_iv;
    }
    std::array<uint32_t, 4> K = tables::sha1_k;
    if (spec.constants_override && !spec.constants_override->round_constants.empty())
        for (int i = 0; i < 4; ++i) K[i] = spec.constants_override->round_constants[i];
    const bool x = spec.add_as_xor;
    BitVector padded = pad_md(msg, false);
    int rounds = spec.effective_rounds();
    for (std::size_t off = 0; off < padded.size(); off += 512) {
        std::vector<uint32_t> w(std::max(rounds, 16));
        for (int i = 0; i < 16; ++i) w[i] = bits_to_u32be(padded, off + 32 * i);
        for (int i = 16; i < rounds; ++i)
            w[i] = rotl32(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
        for (int i = 0; i < rounds; ++i) {
            uint32_t f;
            if (i < 20) f = (b & c) | (~b & d);
            else if (i < 40) f = b ^ c ^ d;
            else if (i < 60) f = (b & c) | (b & d) | (c & d);
            else f = b ^ c ^ d;
            uint32_t t = wadd(wadd(wadd(wadd(rotl32(a, 5), f, x), e, x), K[i / 20], x), w[i], x);
            e = d; d = c; c = rotl32(b, 30); b = a; a = t;
        }
        if (spec.keep_feedforward) {
            h[0] = wadd(h[0], a, x); h[1] = wadd(h[1], b, x); h[2] = wadd(h[2], c, x);
            h[3] = wadd(h[3], d, x); h[4] = wadd(h[4], e, x);
        } else {
            h = {a, b, c, d, e};
        }
    }
    BitVector out;
    for (uint32_t w : h) append_u32be(out, w);
    return out;
}

inline BitVector sha2_256_binary(const HashSpec& spec, const BitVector& msg) {
    std::array<uint32_t, 8> h;
    if (spec.constants_override && !spec.constants_override->initial_state.empty()) {
        for (int i = 0; i < 8; ++i) h[i] = spec.constants_override->initial_state[i];
    } else {
        h = tables::sha256_iv;
    }
    const auto& K = spec.constants_override && !spec.constants_override->round_constants.empty()
                        ? spec.constants_override->round_constants
                        : std::vector<uint32_t>(tables::sha256_k().begin(), tables::sha256_k().end());
    const bool x = spec.add_as_xor;
    BitVector padded = pad_md(msg, false);
    int rounds = spec.effective_rounds();
    for (std::size_t off = 0; off < padded.size(); off += 512) {
        std::vector<uint32_t> w(std::max(rounds, 16));
        for (int i = 0; i < 16; ++i) w[i] = bits_to_u32be(padded, off + 32 * i);
        for (int i = 16; i < rounds; ++i) {
            uint32_t s0 = rotr32(w[i - 15], 7) ^ rotr32(w[i - 15], 18) ^ (w[i - 15] >> 3);
            uint32_t s1 = rotr32(w[i - 2], 17) ^ rotr32(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = wadd(wadd(wadd(w[i - 16], s0, x), w[i - 7], x), s1, x);
        }
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int i = 0; i < rounds; ++i) {
            uint32_t s1 = rotr32(e, 6) ^ rotr32(e, 11) ^ rotr32(e, 25);
            uint32_t p = spec.sha2_p_xor ? ((e & f) ^ (~e & g)) : ((e & f) | (~e & g));
            uint32_t t1 = wadd(wadd(wadd(wadd(hh, s1, x), p, x), K[i], x), w[i], x);
            uint32_t s0 = rotr32(a, 2) ^ rotr32(a, 13) ^ rotr32(a, 22);
            uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            uint32_t t2 = wadd(s0, maj, x);
            hh = g; g = f; f = e; e = wadd(d, t1, x);
            d = c; c = b; b = a; a = wadd(t1, t2, x);
        }
        if (spec.keep_feedforward) {
            uint32_t v[8] = {a, b, c, d, e, f, g, hh};
            for (int i = 0; i < 8; ++i) h[i] = wadd(h[i], v[i], x);
        } else {
            h = {a, b, c, d, e, f, g, hh};
        }
    }
    BitVector out;
    for (uint32_t w : h) append_u32be(out, w);
    return out;
}

inline BitVector keccak1600_binary(const HashSpec& spec, const BitVector& msg) {
    int rate = spec.effective_rate();
    BitVector padded = pad_keccak(msg, rate, spec.domain_byte);
    std::array<uint64_t, 25> lanes{};
    for (std::size_t off = 0; off < padded.size(); off += rate) {
        for (int i = 0; i < rate; ++i)
            if (padded[off + i]) lanes[i / 64] ^= uint64_t{1} << (i % 64);
        keccak_f_lanes(lanes, 64, spec.effective_rounds(), spec.step_mask);
    }
    int k = spec.effective_out_bits();
    BitVector out(k);
    for (int i = 0; i < k; ++i) out[i] = (lanes[i / 64] >> (i % 64)) & 1u;
    return out;
}

inline BitVector sha1_round_state_binary(const HashSpec& spec, const BitVector& input) {
    if (input.size() != 192)
        throw std::invalid_argument("sha1_round_state: input must be 160+32 bits");
    uint32_t s[5];
    for (int i = 0; i < 5; ++i) s[i] = bits_to_u32le(input, 32 * i);
    uint32_t w = bits_to_u32le(input, 160);
    uint32_t k0 = spec.constants_override && !spec.constants_override->round_constants.empty()
                      ? spec.constants_override->round_constants[0]
                      : tables::sha1_k[0];
    const bool x = spec.add_as_xor;
    uint32_t f = (s[1] & s[2]) | (~s[1] & s[3]);
    uint32_t t = wadd(wadd(wadd(wadd(rotl32(s[0], 5), f, x), s[4], x), k0, x), w, x);
    uint32_t ns[5] = {t, s[0], rotl32(s[1], 30), s[2], s[3]};
    BitVector out;
    for (uint32_t v : ns) append_u32le(out, v);
    return out;
}

inline BitVector keccak200_perm_binary(const HashSpec& spec, const BitVector& state) {
    if (state.size() != 200) throw std::invalid_argument("keccak200-perm: state must be 200 bits");
    return keccak_f_binary(state, spec.effective_rounds(), spec.step_mask);
}

inline BitVector add_toy_binary(const BitVector& msg) {
    if (msg.size() != 64) throw std::invalid_argument("add-toy: message must be 64 bits");
    uint32_t a = bits_to_u32le(msg, 0), b = bits_to_u32le(msg, 32);
    BitVector out;
    append_u32le(out, a + b);
    return out;
}

}  // namespace detail

/// Exact digest through the classical word-level path. For MD/SHA the
/// reduced round count truncates only the round loop; padding, message
/// schedule and (by default) the final feed-forward ADD are unchanged.
inline BitVector binary_digest(const HashSpec& spec, const BitVector& msg) {
    spec.validate();
    switch (spec.algorithm) {
        case HashAlgorithm::MD5: return detail::md5_binary(spec, msg);
        case HashAlgorithm::SHA1: return detail::sha1_binary(spec, msg);
        case HashAlgorithm::SHA2_256: return detail::sha2_256_binary(spec, msg);
        case HashAlgorithm::KECCAK1600: return detail::keccak1600_binary(spec, msg);
        case HashAlgorithm::KECCAK200_PERM: return detail::keccak200_perm_binary(spec, msg);
        case HashAlgorithm::SHA1_ROUND_STATE: return detail::sha1_round_state_binary(spec, msg);
        case HashAlgorithm::ADD_TOY: return detail::add_toy_binary(msg);
    }
    throw std::logic_error("binary_digest: unknown algorithm");
}

}  // namespace fuzhash

#endif

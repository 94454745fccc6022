#ifndef FUZHASH_BITS_HPP
#define FUZHASH_BITS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fuzhash {

/// A bit string of arbitrary length (not necessarily byte-aligned).
///
/// Indexing convention: bit i of a byte stream is the bit of weight
/// 2^(i mod 8) within byte i/8 (LSB-first within bytes, bytes in natural
/// order). All indices are 0-based.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n, uint8_t fill = 0) : bits_(n, fill) {
        if (fill > 1) throw std::invalid_argument("BitVector: fill must be 0 or 1");
    }
    explicit BitVector(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
        for (uint8_t b : bits_)
            if (b > 1) throw std::invalid_argument("BitVector: elements must be 0 or 1");
    }

    static BitVector from_bytes(const std::vector<uint8_t>& bytes) {
        BitVector v;
        v.bits_.reserve(bytes.size() * 8);
        for (uint8_t by : bytes)
            for (int i = 0; i < 8; ++i) v.bits_.push_back((by >> i) & 1u);
        return v;
    }

    static BitVector from_ascii(std::string_view text) {
        std::vector<uint8_t> bytes;
        bytes.reserve(text.size());
        for (char c : text) {
            auto u = static_cast<unsigned char>(c);
            if (u >= 128) throw std::invalid_argument("BitVector: non-ASCII code point");
            bytes.push_back(u);
        }
        return from_bytes(bytes);
    }

    static BitVector from_hex(std::string_view hex) {
        if (hex.size() % 2 != 0) throw std::invalid_argument("BitVector: odd hex length");
        std::vector<uint8_t> bytes;
        bytes.reserve(hex.size() / 2);
        auto nib = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw std::invalid_argument(std::string("BitVector: invalid hex digit '") + c + "'");
        };
        for (std::size_t i = 0; i < hex.size(); i += 2)
            bytes.push_back(static_cast<uint8_t>(nib(hex[i]) * 16 + nib(hex[i + 1])));
        return from_bytes(bytes);
    }

    /// Parses a string of '0'/'1' characters (for non-byte-aligned lengths).
    static BitVector from_bitstring(std::string_view s) {
        BitVector v;
        v.bits_.reserve(s.size());
        for (char c : s) {
            if (c != '0' && c != '1') throw std::invalid_argument("BitVector: invalid bit character");
            v.bits_.push_back(static_cast<uint8_t>(c - '0'));
        }
        return v;
    }

    std::vector<uint8_t> to_bytes() const {
        if (bits_.size() % 8 != 0) throw std::logic_error("BitVector: length not byte-aligned");
        std::vector<uint8_t> bytes(bits_.size() / 8, 0);
        for (std::size_t i = 0; i < bits_.size(); ++i)
            bytes[i / 8] |= static_cast<uint8_t>(bits_[i] << (i % 8));
        return bytes;
    }

    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (uint8_t by : to_bytes()) {
            out.push_back(digits[by >> 4]);
            out.push_back(digits[by & 0xf]);
        }
        return out;
    }

    std::string to_bitstring() const {
        std::string s;
        s.reserve(bits_.size());
        for (uint8_t b : bits_) s.push_back(static_cast<char>('0' + b));
        return s;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    uint8_t operator[](std::size_t i) const { return bits_[i]; }
    uint8_t& operator[](std::size_t i) { return bits_[i]; }
    const std::vector<uint8_t>& bits() const { return bits_; }

    void push_back(uint8_t b) {
        if (b > 1) throw std::invalid_argument("BitVector: bit must be 0 or 1");
        bits_.push_back(b);
    }
    void append(const BitVector& other) {
        bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    }

    bool operator==(const BitVector& o) const = default;

private:
    std::vector<uint8_t> bits_;
};

}  // namespace fuzhash

#endif

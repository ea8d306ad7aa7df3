#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ads {

// Finite ordered bit sequence, packed MSB-first (bit i lives in byte i/8 at
// position 7-(i%8)). Unused bits of the last byte are kept zero so that
// equal-length comparison reduces to byte comparison.
class BitString {
public:
    BitString() = default;

    static BitString zeros(std::size_t nbits);
    // s consists of '0'/'1' characters.
    static BitString from_string(std::string_view s);
    // First nbits of `bytes`, MSB-first per byte.
    static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits);
    // width-bit big-endian rendering of value (width <= 64).
    static BitString from_uint(std::uint64_t value, std::uint32_t width);
    static BitString from_hex(std::string_view hex);  // whole bytes only

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool bit(std::size_t i) const {
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
    }
    void set_bit(std::size_t i, bool v) {
        const std::uint8_t m = std::uint8_t(1u << (7 - (i & 7)));
        if (v) bytes_[i >> 3] |= m; else bytes_[i >> 3] &= std::uint8_t(~m);
    }
    void push_back(bool b);
    void append(const BitString& other);
    void truncate(std::size_t nbits);
    BitString prefix(std::size_t nbits) const;

    // Packed bytes, length ceil(size/8), pad bits zero.
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    std::string to_string() const;          // "0101..."
    std::string to_hex() const;             // zero-pads to a byte boundary
    std::vector<std::uint8_t> to_padded_bytes() const { return bytes_; }

    // value of the first min(size,64) bits, MSB-first
    std::uint64_t leading_uint() const;

    std::size_t common_prefix_len(const BitString& other) const;
    bool is_prefix_of(const BitString& other) const;

    friend bool operator==(const BitString& a, const BitString& b) {
        return a.nbits_ == b.nbits_ && a.bytes_ == b.bytes_;
    }
    // Lexicographic bit order; a proper prefix sorts before its extensions.
    std::strong_ordering operator<=>(const BitString& other) const;

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t nbits_ = 0;
};

}  // namespace ads

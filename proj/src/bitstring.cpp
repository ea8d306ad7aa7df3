#include "ads/bitstring.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace ads {

BitString BitString::zeros(std::size_t nbits) {
    BitString out;
    out.nbits_ = nbits;
    out.bytes_.assign((nbits + 7) / 8, 0);
    return out;
}

BitString BitString::from_string(std::string_view s) {
    BitString out = zeros(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') {
            out.bytes_[i >> 3] |= std::uint8_t(1u << (7 - (i & 7)));
        } else if (s[i] != '0') {
            throw std::invalid_argument("BitString::from_string: expected '0'/'1'");
        }
    }
    return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
    if (nbits > bytes.size() * 8) {
        throw std::invalid_argument("BitString::from_bytes: nbits exceeds input");
    }
    BitString out;
    out.nbits_ = nbits;
    out.bytes_.assign(bytes.begin(), bytes.begin() + std::ptrdiff_t((nbits + 7) / 8));
    if (nbits & 7) {  // zero the pad bits
        out.bytes_.back() &= std::uint8_t(0xFFu << (8 - (nbits & 7)));
    }
    return out;
}

BitString BitString::from_uint(std::uint64_t value, std::uint32_t width) {
    if (width > 64) throw std::invalid_argument("BitString::from_uint: width > 64");
    BitString out = zeros(width);
    for (std::uint32_t i = 0; i < width; ++i) {
        if ((value >> (width - 1 - i)) & 1u) {
            out.bytes_[i >> 3] |= std::uint8_t(1u << (7 - (i & 7)));
        }
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

BitString BitString::from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("BitString::from_hex: odd length");
    BitString out;
    out.nbits_ = hex.size() * 4;
    out.bytes_.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]), lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("BitString::from_hex: bad digit");
        out.bytes_.push_back(std::uint8_t(hi << 4 | lo));
    }
    return out;
}

void BitString::push_back(bool b) {
    if ((nbits_ & 7) == 0) bytes_.push_back(0);
    if (b) bytes_.back() |= std::uint8_t(1u << (7 - (nbits_ & 7)));
    ++nbits_;
}

void BitString::append(const BitString& other) {
    if ((nbits_ & 7) == 0) {
        bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
        nbits_ += other.nbits_;
        return;
    }
    for (std::size_t i = 0; i < other.nbits_; ++i) push_back(other.bit(i));
}

void BitString::truncate(std::size_t nbits) {
    if (nbits >= nbits_) return;
    nbits_ = nbits;
    bytes_.resize((nbits + 7) / 8);
    if (nbits & 7) bytes_.back() &= std::uint8_t(0xFFu << (8 - (nbits & 7)));
}

BitString BitString::prefix(std::size_t nbits) const {
    BitString out = *this;
    out.truncate(nbits);
    return out;
}

std::string BitString::to_string() const {
    std::string s(nbits_, '0');
    for (std::size_t i = 0; i < nbits_; ++i) {
        if (bit(i)) s[i] = '1';
    }
    return s;
}

std::string BitString::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes_.size() * 2);
    for (std::uint8_t b : bytes_) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

std::uint64_t BitString::leading_uint() const {
    std::uint64_t v = 0;
    const std::size_t n = std::min<std::size_t>(nbits_, 64);
    for (std::size_t i = 0; i < n; ++i) v = (v << 1) | std::uint64_t(bit(i));
    return v;
}

std::size_t BitString::common_prefix_len(const BitString& other) const {
    const std::size_t n = std::min(nbits_, other.nbits_);
    const std::size_t nb = n / 8;
    std::size_t i = 0;
    while (i < nb && bytes_[i] == other.bytes_[i]) ++i;
    std::size_t pos = i * 8;
    if (i < nb) {
        const auto diff = std::uint8_t(bytes_[i] ^ other.bytes_[i]);
        return pos + std::size_t(std::countl_zero(diff));
    }
    while (pos < n && bit(pos) == other.bit(pos)) ++pos;
    return pos;
}

bool BitString::is_prefix_of(const BitString& other) const {
    return nbits_ <= other.nbits_ && common_prefix_len(other) == nbits_;
}

std::strong_ordering BitString::operator<=>(const BitString& other) const {
    const std::size_t n = std::min(nbits_, other.nbits_);
    const std::size_t lcp = common_prefix_len(other);
    if (lcp < n) {
        return bit(lcp) ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return nbits_ <=> other.nbits_;
}

}  // namespace ads

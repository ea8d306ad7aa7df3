#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace ads {

// Streaming SHA-256. The object is a plain value: copying it snapshots the
// midstate, which the keyed-seed derivation uses to hash many candidates that
// share a long prefix without rehashing the shared part.
class Sha256 {
public:
    Sha256() { reset(); }

    void reset();
    void update(const std::uint8_t* data, std::size_t len);
    void update(std::span<const std::uint8_t> data) { update(data.data(), data.size()); }
    // Finalization does not disturb *this; it pads a local copy.
    std::array<std::uint8_t, 32> digest() const;

    static std::array<std::uint8_t, 32> hash(std::span<const std::uint8_t> data);
    static std::string hex(std::span<const std::uint8_t> data);

private:
    void compress_buffered();

    std::array<std::uint32_t, 8> state_;
    std::uint64_t total_len_ = 0;
    std::array<std::uint8_t, 64> buf_;
    std::size_t buf_len_ = 0;
};

std::string to_hex(std::span<const std::uint8_t> bytes);

namespace detail {
// Compression backends, exposed so tests can cross-check the hardware path
// against the portable one.
using Sha256CompressFn = void (*)(std::uint32_t* state, const std::uint8_t* blocks, std::size_t nblocks);
Sha256CompressFn sha256_compress_portable();
Sha256CompressFn sha256_compress_active();
}  // namespace detail

// HMAC-SHA256 with cached inner/outer pad midstates; one key schedule, then
// two compressions per short message.
class HmacSha256 {
public:
    explicit HmacSha256(std::span<const std::uint8_t> key);

    // Returns the inner hash midstate; feed the message into it, then finish().
    Sha256 begin() const { return inner_mid_; }
    std::array<std::uint8_t, 32> finish(const Sha256& inner) const;

    std::array<std::uint8_t, 32> mac(std::span<const std::uint8_t> msg) const;

private:
    Sha256 inner_mid_;
    Sha256 outer_mid_;
};

}  // namespace ads

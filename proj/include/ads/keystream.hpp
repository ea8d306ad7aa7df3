#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "ads/bitstring.hpp"
#include "ads/sha256.hpp"

namespace ads {

// 64-bit channel sampling seed.
struct Seed {
    std::uint64_t value = 0;
    friend bool operator==(Seed, Seed) = default;
};

// 256-bit shared key. Holds the HMAC pad midstates so per-candidate seed
// derivation costs two compressions instead of a full key schedule.
class SecretKey {
public:
    explicit SecretKey(const std::array<std::uint8_t, 32>& bytes)
        : bytes_(bytes), prf_(bytes_) {}

    // Pass-through of caller-supplied entropy; at least 32 bytes required.
    static SecretKey from_entropy(std::span<const std::uint8_t> entropy);
    // Fresh key from the OS entropy source.
    static SecretKey generate();
    static SecretKey from_hex(std::string_view hex);

    const std::array<std::uint8_t, 32>& bytes() const { return bytes_; }
    std::string to_hex() const { return to_hex_str(bytes_); }
    const HmacSha256& prf() const { return prf_; }

private:
    static std::string to_hex_str(std::span<const std::uint8_t> b);
    std::array<std::uint8_t, 32> bytes_;
    HmacSha256 prf_;
};

// Maximum candidate length accepted by derive_seed, in bits.
inline constexpr std::size_t kMaxCandidateBits = 1u << 16;

// Seed for one (step, candidate) pair:
//   first 64 bits of HMAC(key, "ads/seed/1" || step_be64 || bitlen_be32 ||
//   candidate bits packed MSB-first, zero padded), read big-endian.
Seed derive_seed(const SecretKey& key, std::uint64_t step, const BitString& candidate);

// Incremental form of derive_seed for one step over many candidates sharing a
// byte-aligned prefix. begin_step hashes tag/step/bitlen plus `shared_bytes`
// whole bytes of the candidate; finish_candidate supplies the remainder.
Sha256 seed_hash_begin_step(const SecretKey& key, std::uint64_t step,
                            std::uint32_t candidate_bits,
                            std::span<const std::uint8_t> shared_bytes);
Seed seed_hash_finish_candidate(const SecretKey& key, const Sha256& mid,
                                std::span<const std::uint8_t> tail_bytes);

// XOR with the keyed keystream starting at bit `offset`. Keystream block j is
// HMAC(key, "ads/mask/1" || j_be64), consumed MSB-first. Involution at fixed
// (key, offset).
BitString mask(const SecretKey& key, const BitString& bits, std::uint64_t offset = 0);

// Sequential keystream reader used for message padding.
class KeystreamReader {
public:
    explicit KeystreamReader(const SecretKey& key) : key_(&key) {}
    bool bit(std::uint64_t index);

private:
    const SecretKey* key_;
    std::uint64_t block_index_ = ~std::uint64_t{0};
    std::array<std::uint8_t, 32> block_{};
};

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data);

// Self-delimiting payload framing:
//   framed = bitlen_be32 || raw || crc16 over (length bytes || raw packed to
//   a byte boundary).
inline constexpr std::size_t kFrameOverheadBits = 48;

BitString frame_payload(const BitString& raw);

enum class FrameStatus { complete, incomplete, checksum_mismatch };

struct UnframeResult {
    FrameStatus status = FrameStatus::incomplete;
    BitString message;  // valid only when status == complete
};

UnframeResult unframe_payload(const BitString& framed);

const char* to_string(FrameStatus s);

// Key files: 64 hex characters, one line, created 0600 and never overwritten.
void write_key_file(const std::filesystem::path& path, const SecretKey& key);
SecretKey read_key_file(const std::filesystem::path& path);

}  // namespace ads

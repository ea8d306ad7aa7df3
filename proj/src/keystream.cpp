#include "ads/keystream.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "ads/errors.hpp"

namespace ads {

SecretKey SecretKey::from_entropy(std::span<const std::uint8_t> entropy) {
    if (entropy.size() < 32) {
        throw std::invalid_argument("SecretKey::from_entropy: need at least 32 bytes");
    }
    std::array<std::uint8_t, 32> b;
    std::memcpy(b.data(), entropy.data(), 32);
    return SecretKey(b);
}

SecretKey SecretKey::generate() {
    std::random_device rd;
    std::array<std::uint8_t, 32> b;
    for (std::size_t i = 0; i < b.size(); i += 4) {
        const std::uint32_t r = rd();
        b[i + 0] = std::uint8_t(r >> 24);
        b[i + 1] = std::uint8_t(r >> 16);
        b[i + 2] = std::uint8_t(r >> 8);
        b[i + 3] = std::uint8_t(r);
    }
    return SecretKey(b);
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

SecretKey SecretKey::from_hex(std::string_view hex) {
    if (hex.size() != 64) throw std::invalid_argument("SecretKey::from_hex: want 64 hex chars");
    std::array<std::uint8_t, 32> b;
    for (std::size_t i = 0; i < 32; ++i) {
        const int hi = hex_nibble(hex[2 * i]), lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("SecretKey::from_hex: bad digit");
        b[i] = std::uint8_t(hi << 4 | lo);
    }
    return SecretKey(b);
}

std::string SecretKey::to_hex_str(std::span<const std::uint8_t> b) { return ads::to_hex(b); }

namespace {

constexpr char kSeedTag[] = "ads/seed/1";
constexpr char kMaskTag[] = "ads/mask/1";

void put_be64(std::uint8_t* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = std::uint8_t(v >> (56 - 8 * i));
}

void put_be32(std::uint8_t* out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out[i] = std::uint8_t(v >> (24 - 8 * i));
}

Seed seed_from_mac(const std::array<std::uint8_t, 32>& mac) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | mac[i];
    return Seed{v};
}

}  // namespace

Sha256 seed_hash_begin_step(const SecretKey& key, std::uint64_t step,
                            std::uint32_t candidate_bits,
                            std::span<const std::uint8_t> shared_bytes) {
    Sha256 h = key.prf().begin();
    std::uint8_t header[10 + 8 + 4];
    std::memcpy(header, kSeedTag, 10);
    put_be64(header + 10, step);
    put_be32(header + 18, candidate_bits);
    h.update(header, sizeof header);
    h.update(shared_bytes);
    return h;
}

Seed seed_hash_finish_candidate(const SecretKey& key, const Sha256& mid,
                                std::span<const std::uint8_t> tail_bytes) {
    Sha256 h = mid;
    h.update(tail_bytes);
    return seed_from_mac(key.prf().finish(h));
}

Seed derive_seed(const SecretKey& key, std::uint64_t step, const BitString& candidate) {
    if (candidate.size() > kMaxCandidateBits) {
        throw std::invalid_argument("derive_seed: candidate longer than 2^16 bits");
    }
    const Sha256 mid =
        seed_hash_begin_step(key, step, std::uint32_t(candidate.size()), candidate.bytes());
    return seed_hash_finish_candidate(key, mid, {});
}

bool KeystreamReader::bit(std::uint64_t index) {
    const std::uint64_t blk = index / 256;
    if (blk != block_index_) {
        std::uint8_t msg[10 + 8];
        std::memcpy(msg, kMaskTag, 10);
        put_be64(msg + 10, blk);
        block_ = key_->prf().mac(std::span<const std::uint8_t>(msg, sizeof msg));
        block_index_ = blk;
    }
    const std::uint64_t b = index % 256;
    return (block_[b >> 3] >> (7 - (b & 7))) & 1u;
}

BitString mask(const SecretKey& key, const BitString& bits, std::uint64_t offset) {
    if (offset + bits.size() > (std::uint64_t{1} << 32)) {
        throw std::invalid_argument("mask: offset + length exceeds 2^32 bits");
    }
    KeystreamReader ks(key);
    BitString out = BitString::zeros(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out.set_bit(i, bits.bit(i) ^ ks.bit(offset + i));
    }
    return out;
}

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) {
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t byte : data) {
        crc ^= std::uint16_t(byte) << 8;
        for (int i = 0; i < 8; ++i) {
            crc = (crc & 0x8000) ? std::uint16_t(crc << 1 ^ 0x1021) : std::uint16_t(crc << 1);
        }
    }
    return crc;
}

BitString frame_payload(const BitString& raw) {
    if (raw.size() >= (std::uint64_t{1} << 32)) {
        throw std::invalid_argument("frame_payload: payload too long");
    }
    std::vector<std::uint8_t> crc_input(4);
    put_be32(crc_input.data(), std::uint32_t(raw.size()));
    const auto& raw_bytes = raw.bytes();
    crc_input.insert(crc_input.end(), raw_bytes.begin(), raw_bytes.end());
    const std::uint16_t crc = crc16_ccitt_false(crc_input);

    BitString framed = BitString::from_uint(std::uint32_t(raw.size()), 32);
    framed.append(raw);
    framed.append(BitString::from_uint(crc, 16));
    return framed;
}

UnframeResult unframe_payload(const BitString& framed) {
    if (framed.size() < 32) return {FrameStatus::incomplete, {}};
    const auto length = std::uint32_t(framed.prefix(32).leading_uint());
    const std::uint64_t need = 32 + std::uint64_t(length) + 16;
    if (framed.size() < need) return {FrameStatus::incomplete, {}};

    BitString message = BitString::zeros(length);
    for (std::uint32_t i = 0; i < length; ++i) message.set_bit(i, framed.bit(32 + i));
    std::uint16_t crc = 0;
    for (std::uint64_t i = need - 16; i < need; ++i) {
        crc = std::uint16_t(crc << 1 | std::uint16_t(framed.bit(i)));
    }

    std::vector<std::uint8_t> crc_input(4);
    put_be32(crc_input.data(), length);
    const auto& msg_bytes = message.bytes();
    crc_input.insert(crc_input.end(), msg_bytes.begin(), msg_bytes.end());
    if (crc16_ccitt_false(crc_input) != crc) return {FrameStatus::checksum_mismatch, {}};
    return {FrameStatus::complete, std::move(message)};
}

const char* to_string(FrameStatus s) {
    switch (s) {
        case FrameStatus::complete: return "complete";
        case FrameStatus::incomplete: return "incomplete";
        case FrameStatus::checksum_mismatch: return "checksum-mismatch";
    }
    return "unknown";
}

void write_key_file(const std::filesystem::path& path, const SecretKey& key) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0600);
    if (fd < 0) {
        if (errno == EEXIST) {
            throw IoError("key file already exists, refusing to overwrite: " + path.string());
        }
        throw IoError("cannot create key file " + path.string() + ": " + std::strerror(errno));
    }
    const std::string line = key.to_hex() + "\n";
    const ssize_t n = ::write(fd, line.data(), line.size());
    ::close(fd);
    if (n != ssize_t(line.size())) {
        throw IoError("short write to key file " + path.string());
    }
}

SecretKey read_key_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open key file " + path.string());
    std::string line;
    std::getline(in, line);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    try {
        return SecretKey::from_hex(line);
    } catch (const std::invalid_argument& e) {
        throw IoError("malformed key file " + path.string() + ": " + e.what());
    }
}

}  // namespace ads

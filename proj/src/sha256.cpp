#include "ads/sha256.hpp"

#include <bit>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define ADS_HAVE_SHANI_TARGET 1
#endif

namespace ads {
namespace {

constexpr std::uint32_t kK[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
    0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
    0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
    0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
    0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
    0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
    0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
    0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

inline std::uint32_t rotr(std::uint32_t x, int n) { return std::rotr(x, n); }

void compress_portable(std::uint32_t state[8], const std::uint8_t* block, std::size_t nblocks) {
    std::uint32_t w[64];
    while (nblocks--) {
        for (int i = 0; i < 16; ++i) {
            w[i] = std::uint32_t(block[4 * i]) << 24 | std::uint32_t(block[4 * i + 1]) << 16 |
                   std::uint32_t(block[4 * i + 2]) << 8 | std::uint32_t(block[4 * i + 3]);
        }
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = state[0], b = state[1], c = state[2], d = state[3];
        std::uint32_t e = state[4], f = state[5], g = state[6], h = state[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = h + s1 + ch + kK[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            h = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        state[0] += a; state[1] += b; state[2] += c; state[3] += d;
        state[4] += e; state[5] += f; state[6] += g; state[7] += h;
        block += 64;
    }
}

#ifdef ADS_HAVE_SHANI_TARGET
__attribute__((target("sha,sse4.1,ssse3")))
void compress_shani(std::uint32_t state[8], const std::uint8_t* block, std::size_t nblocks) {
    const __m128i shuf = _mm_set_epi64x(0x0c0d0e0f08090a0bULL, 0x0405060700010203ULL);

    __m128i tmp = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&state[0]));
    __m128i st1 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(&state[4]));
    tmp = _mm_shuffle_epi32(tmp, 0xB1);  // CDAB
    st1 = _mm_shuffle_epi32(st1, 0x1B);  // EFGH
    __m128i st0 = _mm_alignr_epi8(tmp, st1, 8);  // ABEF
    st1 = _mm_blend_epi16(st1, tmp, 0xF0);       // CDGH

    while (nblocks--) {
        const __m128i abef_save = st0;
        const __m128i cdgh_save = st1;
        __m128i msg, msg0, msg1, msg2, msg3;

        msg0 = _mm_shuffle_epi8(_mm_loadu_si128(reinterpret_cast<const __m128i*>(block + 0)), shuf);
        msg = _mm_add_epi32(msg0, _mm_set_epi64x(0xE9B5DBA5B5C0FBCFULL, 0x71374491428A2F98ULL));
        st1 = _mm_sha256rnds2_epu32(st1, st0, msg);
        msg = _mm_shuffle_epi32(msg, 0x0E);
        st0 = _mm_sha256rnds2_epu32(st0, st1, msg);

        msg1 = _mm_shuffle_epi8(_mm_loadu_si128(reinterpret_cast<const __m128i*>(block + 16)), shuf);
        msg = _mm_add_epi32(msg1, _mm_set_epi64x(0xAB1C5ED5923F82A4ULL, 0x59F111F13956C25BULL));
        st1 = _mm_sha256rnds2_epu32(st1, st0, msg);
        msg = _mm_shuffle_epi32(msg, 0x0E);
        st0 = _mm_sha256rnds2_epu32(st0, st1, msg);
        msg0 = _mm_sha256msg1_epu32(msg0, msg1);

        msg2 = _mm_shuffle_epi8(_mm_loadu_si128(reinterpret_cast<const __m128i*>(block + 32)), shuf);
        msg = _mm_add_epi32(msg2, _mm_set_epi64x(0x550C7DC3243185BEULL, 0x12835B01D807AA98ULL));
        st1 = _mm_sha256rnds2_epu32(st1, st0, msg);
        msg = _mm_shuffle_epi32(msg, 0x0E);
        st0 = _mm_sha256rnds2_epu32(st0, st1, msg);
        msg1 = _mm_sha256msg1_epu32(msg1, msg2);

        msg3 = _mm_shuffle_epi8(_mm_loadu_si128(reinterpret_cast<const __m128i*>(block + 48)), shuf);
        msg = _mm_add_epi32(msg3, _mm_set_epi64x(0xC19BF1749BDC06A7ULL, 0x80DEB1FE72BE5D74ULL));
        st1 = _mm_sha256rnds2_epu32(st1, st0, msg);
        tmp = _mm_alignr_epi8(msg3, msg2, 4);
        msg0 = _mm_add_epi32(msg0, tmp);
        msg0 = _mm_sha256msg2_epu32(msg0, msg3);
        msg = _mm_shuffle_epi32(msg, 0x0E);
        st0 = _mm_sha256rnds2_epu32(st0, st1, msg);
        msg2 = _mm_sha256msg1_epu32(msg2, msg3);

        static const std::uint64_t k_pairs[12][2] = {
            {0xEFBE4786E49B69C1ULL, 0x240CA1CC0FC19DC6ULL},
            {0x4A7484AA2DE92C6FULL, 0x76F988DA5CB0A9DCULL},
            {0xA831C66D983E5152ULL, 0xBF597FC7B00327C8ULL},
            {0xD5A79147C6E00BF3ULL, 0x1429296706CA6351ULL},
            {0x2E1B213827B70A85ULL, 0x53380D134D2C6DFCULL},
            {0x766A0ABB650A7354ULL, 0x92722C8581C2C92EULL},
            {0xA81A664BA2BFE8A1ULL, 0xC76C51A3C24B8B70ULL},
            {0xD6990624D192E819ULL, 0x106AA070F40E3585ULL},
            {0x1E376C0819A4C116ULL, 0x34B0BCB52748774CULL},
            {0x4ED8AA4A391C0CB3ULL, 0x682E6FF35B9CCA4FULL},
            {0x78A5636F748F82EEULL, 0x8CC7020884C87814ULL},
            {0xA4506CEB90BEFFFAULL, 0xC67178F2BEF9A3F7ULL}};

        // rounds 16..63: identical 4-round schedule pattern
        __m128i* m[4] = {&msg0, &msg1, &msg2, &msg3};
        for (int r = 0; r < 12; ++r) {
            __m128i& cur = *m[r & 3];
            __m128i& nxt = *m[(r + 1) & 3];
            __m128i& prv = *m[(r + 3) & 3];
            msg = _mm_add_epi32(cur, _mm_set_epi64x(std::int64_t(k_pairs[r][1]), std::int64_t(k_pairs[r][0])));
            st1 = _mm_sha256rnds2_epu32(st1, st0, msg);
            tmp = _mm_alignr_epi8(cur, prv, 4);
            nxt = _mm_add_epi32(nxt, tmp);
            nxt = _mm_sha256msg2_epu32(nxt, cur);
            msg = _mm_shuffle_epi32(msg, 0x0E);
            st0 = _mm_sha256rnds2_epu32(st0, st1, msg);
            if (r < 11) prv = _mm_sha256msg1_epu32(prv, cur);
        }

        st0 = _mm_add_epi32(st0, abef_save);
        st1 = _mm_add_epi32(st1, cdgh_save);
        block += 64;
    }

    tmp = _mm_shuffle_epi32(st0, 0x1B);  // FEBA
    st1 = _mm_shuffle_epi32(st1, 0xB1);  // DCHG
    st0 = _mm_blend_epi16(tmp, st1, 0xF0);        // DCBA
    st1 = _mm_alignr_epi8(st1, tmp, 8);           // HGFE
    _mm_storeu_si128(reinterpret_cast<__m128i*>(&state[0]), st0);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(&state[4]), st1);
}
#endif

using CompressFn = detail::Sha256CompressFn;

CompressFn pick_compress() {
#ifdef ADS_HAVE_SHANI_TARGET
    if (__builtin_cpu_supports("sha")) return &compress_shani;
#endif
    return &compress_portable;
}

const CompressFn kCompress = pick_compress();

}  // namespace

namespace detail {
Sha256CompressFn sha256_compress_portable() { return &compress_portable; }
Sha256CompressFn sha256_compress_active() { return kCompress; }
}  // namespace detail

void Sha256::reset() {
    state_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
              0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
    total_len_ = 0;
    buf_len_ = 0;
}

void Sha256::update(const std::uint8_t* data, std::size_t len) {
    total_len_ += len;
    if (buf_len_ != 0) {
        const std::size_t take = std::min(len, 64 - buf_len_);
        std::memcpy(buf_.data() + buf_len_, data, take);
        buf_len_ += take;
        data += take;
        len -= take;
        if (buf_len_ == 64) {
            kCompress(state_.data(), buf_.data(), 1);
            buf_len_ = 0;
        }
    }
    const std::size_t nblocks = len / 64;
    if (nblocks != 0) {
        kCompress(state_.data(), data, nblocks);
        data += nblocks * 64;
        len -= nblocks * 64;
    }
    if (len != 0) {
        std::memcpy(buf_.data(), data, len);
        buf_len_ = len;
    }
}

std::array<std::uint8_t, 32> Sha256::digest() const {
    std::array<std::uint32_t, 8> st = state_;
    std::uint8_t tail[128];
    std::size_t n = buf_len_;
    std::memcpy(tail, buf_.data(), n);
    tail[n++] = 0x80;
    std::size_t pad_to = (n <= 56) ? 56 : 120;
    while (n < pad_to) tail[n++] = 0;
    const std::uint64_t bitlen = total_len_ * 8;
    for (int i = 7; i >= 0; --i) tail[n++] = std::uint8_t(bitlen >> (8 * i));
    kCompress(st.data(), tail, n / 64);

    std::array<std::uint8_t, 32> out;
    for (int i = 0; i < 8; ++i) {
        out[4 * i + 0] = std::uint8_t(st[i] >> 24);
        out[4 * i + 1] = std::uint8_t(st[i] >> 16);
        out[4 * i + 2] = std::uint8_t(st[i] >> 8);
        out[4 * i + 3] = std::uint8_t(st[i]);
    }
    return out;
}

std::array<std::uint8_t, 32> Sha256::hash(std::span<const std::uint8_t> data) {
    Sha256 h;
    h.update(data);
    return h.digest();
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

std::string Sha256::hex(std::span<const std::uint8_t> data) { return to_hex(hash(data)); }

HmacSha256::HmacSha256(std::span<const std::uint8_t> key) {
    std::array<std::uint8_t, 64> k{};
    if (key.size() > 64) {
        const auto kd = Sha256::hash(key);
        std::memcpy(k.data(), kd.data(), kd.size());
    } else {
        std::memcpy(k.data(), key.data(), key.size());
    }
    std::array<std::uint8_t, 64> pad;
    for (int i = 0; i < 64; ++i) pad[i] = std::uint8_t(k[i] ^ 0x36);
    inner_mid_.update(pad.data(), 64);
    for (int i = 0; i < 64; ++i) pad[i] = std::uint8_t(k[i] ^ 0x5c);
    outer_mid_.update(pad.data(), 64);
}

std::array<std::uint8_t, 32> HmacSha256::finish(const Sha256& inner) const {
    const auto inner_digest = inner.digest();
    Sha256 outer = outer_mid_;
    outer.update(inner_digest.data(), inner_digest.size());
    return outer.digest();
}

std::array<std::uint8_t, 32> HmacSha256::mac(std::span<const std::uint8_t> msg) const {
    Sha256 inner = inner_mid_;
    inner.update(msg);
    return finish(inner);
}

}  // namespace ads

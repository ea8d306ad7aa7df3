#include <doctest.h>

#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <random>
#include <string>
#include <vector>

#include "ads/sha256.hpp"

using ads::HmacSha256;
using ads::Sha256;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("NIST SHA-256 known answers") {
    CHECK(Sha256::hex(bytes_of("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(Sha256::hex(bytes_of("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(Sha256::hex(bytes_of("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // one million 'a': exercises many blocks
    const std::vector<std::uint8_t> million(1000000, 'a');
    CHECK(Sha256::hex(million) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("incremental updates match one-shot across split points") {
    std::mt19937_64 rng(11);
    std::vector<std::uint8_t> data(517);
    for (auto& b : data) b = std::uint8_t(rng());
    const auto expect = Sha256::hash(data);
    for (std::size_t split : {std::size_t{0}, std::size_t{1}, std::size_t{63}, std::size_t{64},
                              std::size_t{65}, std::size_t{128}, std::size_t{516}}) {
        Sha256 h;
        h.update(data.data(), split);
        h.update(data.data() + split, data.size() - split);
        CHECK(h.digest() == expect);
    }
    // digest() must not disturb the stream
    Sha256 h;
    h.update(data.data(), 100);
    (void)h.digest();
    h.update(data.data() + 100, data.size() - 100);
    CHECK(h.digest() == expect);
}

TEST_CASE("agrees with OpenSSL on random inputs") {
    std::mt19937_64 rng(13);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::uint8_t> data(rng() % 300);
        for (auto& b : data) b = std::uint8_t(rng());
        std::uint8_t expect[32];
        SHA256(data.data(), data.size(), expect);
        const auto got = Sha256::hash(data);
        CHECK(std::equal(got.begin(), got.end(), expect));
    }
}

TEST_CASE("hardware and portable compression agree") {
    const auto portable = ads::detail::sha256_compress_portable();
    const auto active = ads::detail::sha256_compress_active();
    if (portable == active) {
        MESSAGE("no SHA extension path on this host; nothing to cross-check");
        return;
    }
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t nblocks = 1 + rng() % 4;
        std::vector<std::uint8_t> blocks(nblocks * 64);
        for (auto& b : blocks) b = std::uint8_t(rng());
        std::uint32_t s1[8], s2[8];
        for (int i = 0; i < 8; ++i) s1[i] = s2[i] = std::uint32_t(rng());
        portable(s1, blocks.data(), nblocks);
        active(s2, blocks.data(), nblocks);
        CHECK(std::equal(s1, s1 + 8, s2));
    }
}

TEST_CASE("HMAC-SHA256 RFC 4231 vectors") {
    // test case 1
    {
        const std::vector<std::uint8_t> key(20, 0x0b);
        const HmacSha256 h(key);
        CHECK(ads::to_hex(h.mac(bytes_of("Hi There"))) ==
              "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
    }
    // test case 2
    {
        const HmacSha256 h(bytes_of("Jefe"));
        CHECK(ads::to_hex(h.mac(bytes_of("what do ya want for nothing?"))) ==
              "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
    }
    // test case 6: key longer than one block gets hashed first
    {
        const std::vector<std::uint8_t> key(131, 0xaa);
        const HmacSha256 h(key);
        CHECK(ads::to_hex(h.mac(bytes_of("Test Using Larger Than Block-Size Key - Hash Key First"))) ==
              "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54");
    }
}

TEST_CASE("HMAC agrees with OpenSSL on random key/message pairs") {
    std::mt19937_64 rng(19);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::uint8_t> key(1 + rng() % 80);
        std::vector<std::uint8_t> msg(rng() % 200);
        for (auto& b : key) b = std::uint8_t(rng());
        for (auto& b : msg) b = std::uint8_t(rng());

        std::uint8_t expect[32];
        unsigned int len = 0;
        HMAC(EVP_sha256(), key.data(), int(key.size()), msg.data(), msg.size(), expect, &len);
        REQUIRE(len == 32);

        const HmacSha256 h(key);
        const auto got = h.mac(msg);
        CHECK(std::equal(got.begin(), got.end(), expect));
    }
}

TEST_CASE("midstate split mac equals one-shot mac") {
    std::mt19937_64 rng(23);
    std::vector<std::uint8_t> key(32), msg(300);
    for (auto& b : key) b = std::uint8_t(rng());
    for (auto& b : msg) b = std::uint8_t(rng());
    const HmacSha256 h(key);
    const auto expect = h.mac(msg);
    for (std::size_t split : {std::size_t{0}, std::size_t{5}, std::size_t{64}, std::size_t{299}}) {
        Sha256 inner = h.begin();
        inner.update(msg.data(), split);
        inner.update(msg.data() + split, msg.size() - split);
        CHECK(h.finish(inner) == expect);
    }
}

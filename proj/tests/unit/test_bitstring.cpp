#include <doctest.h>

#include <random>
#include <stdexcept>

#include "ads/bitstring.hpp"

using ads::BitString;

TEST_CASE("construction and round trips") {
    CHECK(BitString{}.empty());
    CHECK(BitString::zeros(5).to_string() == "00000");

    const BitString b = BitString::from_string("10110011");
    CHECK(b.size() == 8);
    CHECK(b.to_string() == "10110011");
    CHECK(b.bytes()[0] == 0xB3);
    CHECK(b.to_hex() == "b3");

    CHECK(BitString::from_uint(0b1011, 4).to_string() == "1011");
    CHECK(BitString::from_uint(2, 6).to_string() == "000010");
    CHECK(BitString::from_hex("a5").to_string() == "10100101");

    const std::uint8_t raw[] = {0xFF, 0x00};
    CHECK(BitString::from_bytes(raw, 10).to_string() == "1111111100");
    // pad bits of the final byte must stay cleared
    CHECK(BitString::from_bytes(raw, 3).bytes()[0] == 0xE0);

    CHECK_THROWS_AS(BitString::from_string("10x"), std::invalid_argument);
    CHECK_THROWS_AS(BitString::from_hex("abc"), std::invalid_argument);
}

TEST_CASE("push_back, append, truncate, prefix") {
    BitString b;
    for (bool bit : {true, false, true}) b.push_back(bit);
    CHECK(b.to_string() == "101");

    b.append(BitString::from_string("0011"));
    CHECK(b.to_string() == "1010011");

    BitString aligned = BitString::from_string("10110011");
    aligned.append(BitString::from_string("11110000"));
    CHECK(aligned.to_string() == "1011001111110000");

    CHECK(b.prefix(3).to_string() == "101");
    CHECK(b.prefix(100).to_string() == "1010011");
    b.truncate(2);
    CHECK(b.to_string() == "10");
    CHECK(b.bytes()[0] == 0x80);

    CHECK(b.leading_uint() == 0b10);
    CHECK(BitString::from_uint(0xDEADBEEF, 32).leading_uint() == 0xDEADBEEF);
}

TEST_CASE("lexicographic order and common prefixes") {
    const auto s = [](const char* t) { return BitString::from_string(t); };
    CHECK(s("0") < s("1"));
    CHECK(s("01") < s("10"));
    CHECK(s("10") < s("100"));  // proper prefix sorts first
    CHECK(s("100") < s("11"));
    CHECK(s("1010") == s("1010"));

    CHECK(s("101001").common_prefix_len(s("101000")) == 5);
    CHECK(s("0").common_prefix_len(s("1")) == 0);
    CHECK(s("1111").common_prefix_len(s("1111")) == 4);
    CHECK(s("10100").is_prefix_of(s("101001")));
    CHECK(!s("11").is_prefix_of(s("10")));
}

TEST_CASE("order agrees with string comparison on random data") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 2000; ++iter) {
        std::string sa, sb;
        const std::size_t len_a = 1 + rng() % 20, len_b = 1 + rng() % 20;
        for (std::size_t i = 0; i < len_a; ++i) sa.push_back(rng() & 1 ? '1' : '0');
        for (std::size_t i = 0; i < len_b; ++i) sb.push_back(rng() & 1 ? '1' : '0');
        const BitString a = BitString::from_string(sa), b = BitString::from_string(sb);
        CHECK((a < b) == (sa < sb));
        CHECK((a == b) == (sa == sb));

        std::size_t lcp = 0;
        while (lcp < std::min(sa.size(), sb.size()) && sa[lcp] == sb[lcp]) ++lcp;
        CHECK(a.common_prefix_len(b) == lcp);
    }
}

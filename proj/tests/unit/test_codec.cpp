#include <doctest.h>

#include <random>

#include "ads/codec.hpp"
#include "ads/errors.hpp"
#include "ads/eval.hpp"

using ads::BitString;
using ads::ChannelSpec;
using ads::CodecParams;
using ads::SecretKey;
using ads::StopMode;
using ads::TokenId;

namespace {

SecretKey fixed_key(std::uint8_t b) {
    std::array<std::uint8_t, 32> bytes;
    bytes.fill(b);
    return SecretKey(bytes);
}

ads::ReplayEntry entry(const SecretKey& key, std::uint64_t step, const char* candidate,
                       std::vector<TokenId> history, TokenId token) {
    const ads::Seed s = ads::derive_seed(key, step, BitString::from_string(candidate));
    return {s.value, std::move(history), token};
}

}  // namespace

TEST_CASE("stop policy parsing") {
    CHECK(ads::StopPolicy::parse("eos").mode == StopMode::natural_eos);
    CHECK(ads::StopPolicy::parse("disambiguation").mode == StopMode::disambiguation);
    const auto m = ads::StopPolicy::parse("max:500");
    CHECK(m.mode == StopMode::max_tokens);
    CHECK(m.budget == 500);
    CHECK(m.to_string() == "max:500");
    CHECK_THROWS_AS(ads::StopPolicy::parse("max:0"), ads::ConfigError);
    CHECK_THROWS_AS(ads::StopPolicy::parse("sometimes"), ads::ConfigError);
}

// Three-step collision walkthrough on a scripted channel: the masked message
// starts 10, the sole survivor expands twice, and at the third step two
// candidates collide on one token, leaving {101000, 101001}.
TEST_CASE("scripted three-step walkthrough") {
    const SecretKey key = fixed_key(0x77);
    const BitString masked_target = BitString::from_string("101000");
    // encode() masks the payload, so feed it the preimage of the target bits
    const BitString message = ads::mask(key, masked_target, 0);

    std::vector<ads::ReplayEntry> script;
    // step 0, history []: four distinct tokens; "10" maps to 2
    script.push_back(entry(key, 0, "00", {}, 0));
    script.push_back(entry(key, 0, "01", {}, 1));
    script.push_back(entry(key, 0, "10", {}, 2));
    script.push_back(entry(key, 0, "11", {}, 3));
    // step 1, history [2]: survivors of "10" expanded twice; "1010" maps to 6
    script.push_back(entry(key, 1, "1000", {2}, 4));
    script.push_back(entry(key, 1, "1001", {2}, 5));
    script.push_back(entry(key, 1, "1010", {2}, 6));
    script.push_back(entry(key, 1, "1011", {2}, 0));
    // step 2, history [2, 6]: "101000" and "101001" collide on token 3
    script.push_back(entry(key, 2, "101000", {2, 6}, 3));
    script.push_back(entry(key, 2, "101001", {2, 6}, 3));
    script.push_back(entry(key, 2, "101010", {2, 6}, 1));
    script.push_back(entry(key, 2, "101011", {2, 6}, 5));
    const ChannelSpec channel = ChannelSpec::make_replay(8, script);

    CodecParams params;
    params.n = 2;
    params.framed = false;
    params.stop = {StopMode::max_tokens, 3};

    const ads::EncodeResult enc = ads::encode(message, key, channel, {}, params);
    CHECK(enc.transcript.tokens == std::vector<TokenId>{2, 6, 3});
    CHECK(enc.reason == ads::EncodeStop::token_budget);
    REQUIRE(enc.transcript.steps.size() == 3);
    CHECK(enc.transcript.steps[0].cs_before_filter == 4);
    CHECK(enc.transcript.steps[0].cs_after_filter == 1);
    CHECK(enc.transcript.steps[0].l_after_expand == 4);
    CHECK(enc.transcript.steps[2].cs_after_filter == 2);
    CHECK(enc.transcript.steps[2].l_after_expand == 6);  // no expansion at the floor
    CHECK(enc.transcript.embedded_bits == 6);
    CHECK(enc.transcript.decodable_bits == 5);  // shared prefix 10100

    // the decoder walks the same trajectory and recovers the shared prefix
    const ads::DecodeResult dec = ads::decode(enc.transcript.tokens, key, channel, {}, params);
    CHECK(dec.masked_prefix.to_string() == "10100");
    CHECK(dec.payload_bits == message.prefix(5));
    CHECK(dec.steps == enc.transcript.steps);

    // the same walk through the raw state machine exposes the final set
    ads::CollisionSet cs = ads::init_collision_set(2);
    ads::History h;
    for (TokenId t : enc.transcript.tokens) {
        const ads::StepMap map = ads::build_step_map(cs, key, channel, h);
        h.append(t);
        cs = ads::filter(std::move(cs), map, t);
        ads::expand(cs, 2, params.max_prefix_bits);
        cs.step += 1;
    }
    REQUIRE(cs.size() == 2);
    CHECK(cs.candidates[0].to_string() == "101000");
    CHECK(cs.candidates[1].to_string() == "101001");

    // a prefix of the transcript decodes a prefix of the payload
    const std::vector<TokenId> two(enc.transcript.tokens.begin(),
                                   enc.transcript.tokens.begin() + 2);
    const ads::DecodeResult partial = ads::decode(two, key, channel, {}, params);
    CHECK(partial.masked_prefix.to_string() == "1010");
}

TEST_CASE("round trips over uniform and markov channels") {
    std::mt19937_64 seeder(101);
    const ChannelSpec uniform16 = ChannelSpec::make_uniform(16);
    const ChannelSpec uniform256 = ChannelSpec::make_uniform(256);

    std::vector<double> init(8, 0.125);
    std::vector<double> table;
    std::mt19937_64 trng(55);
    for (int r = 0; r < 8; ++r) {
        std::vector<double> row(8);
        double sum = 0;
        for (auto& p : row) sum += (p = 1.0 + double(trng() % 1000));
        for (int c = 0; c < 8; ++c) row[c] /= sum;
        double rs = 0;
        for (int c = 0; c < 7; ++c) rs += row[c];
        row[7] = 1.0 - rs;  // exact unit sum
        table.insert(table.end(), row.begin(), row.end());
    }
    const ChannelSpec markov8 = ChannelSpec::make_markov(init, table, 7);

    const ChannelSpec* channels[] = {&uniform16, &uniform256, &markov8};
    for (int iter = 0; iter < 40; ++iter) {
        ads::TestRng rng(seeder());
        const ChannelSpec& channel = *channels[iter % 3];
        CodecParams params;
        params.n = std::uint32_t(1 + rng.below(8));
        params.framed = (iter % 2) == 0;
        params.stop = {StopMode::disambiguation, 0};
        const std::size_t len = 1 + rng.below(300);
        const BitString message = rng.next_bits(len);
        const SecretKey key = rng.next_key();

        const ads::EncodeResult enc = ads::encode(message, key, channel, {0}, params);
        CHECK(enc.reason == ads::EncodeStop::disambiguated);
        const ads::DecodeResult dec =
            ads::decode(enc.transcript.tokens, key, channel, {0}, params);

        if (params.framed) {
            REQUIRE(dec.frame_status == ads::FrameStatus::complete);
            REQUIRE(dec.message.has_value());
            CHECK(*dec.message == message);
        } else {
            REQUIRE(dec.payload_bits.size() >= message.size());
            CHECK(dec.payload_bits.prefix(message.size()) == message);
        }
        CHECK(ads::success_rate(message, params.framed ? *dec.message : dec.payload_bits) == 1.0);

        // paired trajectories are identical step by step
        CHECK(dec.steps == enc.transcript.steps);
    }
}

TEST_CASE("round trip at the extreme message lengths") {
    const ChannelSpec channel = ChannelSpec::make_uniform(256);
    ads::TestRng rng(808);
    for (std::size_t len : {std::size_t{1}, std::size_t{4096}}) {
        CodecParams params;
        params.n = 8;
        params.framed = true;
        params.stop = {StopMode::disambiguation, 0};
        const BitString message = rng.next_bits(len);
        const SecretKey key = rng.next_key();
        const ads::EncodeResult enc = ads::encode(message, key, channel, {}, params);
        const ads::DecodeResult dec = ads::decode(enc.transcript.tokens, key, channel, {}, params);
        REQUIRE(dec.frame_status == ads::FrameStatus::complete);
        CHECK(ads::success_rate(message, *dec.message) == 1.0);
    }
}

TEST_CASE("shared prefix grows monotonically along the transcript") {
    const ChannelSpec channel = ChannelSpec::make_uniform(16);
    ads::TestRng rng(606);
    const SecretKey key = rng.next_key();
    const BitString message = rng.next_bits(96);
    CodecParams params;
    params.n = 3;
    params.framed = false;
    params.stop = {StopMode::disambiguation, 0};
    const ads::EncodeResult enc = ads::encode(message, key, channel, {}, params);
    const BitString full_masked = ads::mask(key, message, 0);

    BitString previous;
    for (std::size_t k = 1; k <= enc.transcript.tokens.size(); ++k) {
        const std::vector<TokenId> head(enc.transcript.tokens.begin(),
                                        enc.transcript.tokens.begin() + std::ptrdiff_t(k));
        const ads::DecodeResult dec = ads::decode(head, key, channel, {}, params);
        CHECK(previous.is_prefix_of(dec.masked_prefix));
        // every disambiguated bit is a bit of the masked payload (with
        // keystream padding past the end)
        const std::size_t overlap = std::min(dec.masked_prefix.size(), full_masked.size());
        CHECK(dec.masked_prefix.prefix(overlap) == full_masked.prefix(overlap));
        previous = dec.masked_prefix;
    }
    CHECK(previous.size() >= message.size());
}

TEST_CASE("n=1 degenerate floor still round-trips") {
    const ChannelSpec channel = ChannelSpec::make_uniform(16);
    ads::TestRng rng(999);
    CodecParams params;
    params.n = 1;
    params.framed = true;
    params.stop = {StopMode::disambiguation, 0};
    const BitString message = rng.next_bits(64);
    const SecretKey key = rng.next_key();
    const ads::EncodeResult enc = ads::encode(message, key, channel, {}, params);
    const ads::DecodeResult dec = ads::decode(enc.transcript.tokens, key, channel, {}, params);
    REQUIRE(dec.frame_status == ads::FrameStatus::complete);
    CHECK(*dec.message == message);
}

TEST_CASE("message shorter than the initial window is padded and recovered") {
    const ChannelSpec channel = ChannelSpec::make_uniform(64);
    const SecretKey key = fixed_key(0x09);
    CodecParams params;
    params.n = 8;  // l starts at 8, message has 4 bits
    params.framed = false;
    params.stop = {StopMode::disambiguation, 0};
    const BitString message = BitString::from_string("1011");
    const ads::EncodeResult enc = ads::encode(message, key, channel, {}, params);
    const ads::DecodeResult dec = ads::decode(enc.transcript.tokens, key, channel, {}, params);
    REQUIRE(dec.payload_bits.size() >= 4);
    CHECK(dec.payload_bits.prefix(4) == message);
}

TEST_CASE("eos stop counts the final step on both sides") {
    const SecretKey key = fixed_key(0x31);
    // n=1 over vocab 4 with eot 3: candidate 0 draws the eot token
    std::vector<ads::ReplayEntry> script;
    script.push_back(entry(key, 0, "0", {}, 3));
    script.push_back(entry(key, 0, "1", {}, 1));
    const ChannelSpec channel = ChannelSpec::make_replay(4, script, 3);

    const BitString masked_target = BitString::from_string("0");
    const BitString message = ads::mask(key, masked_target, 0);

    CodecParams params;
    params.n = 1;
    params.framed = false;
    params.stop = {StopMode::natural_eos, 0};
    const ads::EncodeResult enc = ads::encode(message, key, channel, {}, params);
    CHECK(enc.reason == ads::EncodeStop::eos);
    CHECK(enc.transcript.tokens == std::vector<TokenId>{3});
    CHECK(enc.transcript.decodable_bits == 1);

    const ads::DecodeResult dec = ads::decode(enc.transcript.tokens, key, channel, {}, params);
    CHECK(dec.steps == enc.transcript.steps);
    CHECK(dec.payload_bits == message);
}

TEST_CASE("zero-entropy channel embeds nothing") {
    // one-hot rows: every candidate maps to the same token, filtering never
    // shrinks the set, expansion is guarded, no bits disambiguate
    std::vector<double> init{1.0, 0.0};
    std::vector<double> table{1.0, 0.0, 1.0, 0.0};
    const ChannelSpec channel = ChannelSpec::make_markov(init, table, std::nullopt);
    const SecretKey key = fixed_key(0x44);
    CodecParams params;
    params.n = 3;
    params.framed = false;
    params.stop = {StopMode::max_tokens, 5};
    const ads::EncodeResult enc =
        ads::encode(BitString::from_string("101"), key, channel, {}, params);
    CHECK(enc.transcript.tokens == std::vector<TokenId>(5, 0));
    CHECK(enc.transcript.decodable_bits == 0);
    CHECK(enc.transcript.embedded_bits == 3);  // l never grows
    for (const auto& s : enc.transcript.steps) {
        CHECK(s.cs_before_filter == 8);
        CHECK(s.cs_after_filter == 8);
    }
}

TEST_CASE("empty stego decodes to an empty, incomplete payload") {
    const ChannelSpec channel = ChannelSpec::make_uniform(16);
    const SecretKey key = fixed_key(0x50);
    CodecParams params;
    params.n = 4;
    const ads::DecodeResult dec = ads::decode({}, key, channel, {}, params);
    CHECK(dec.payload_bits.empty());
    CHECK(dec.frame_status == ads::FrameStatus::incomplete);
}

TEST_CASE("wrong key yields desync or checksum mismatch, never a message") {
    const ChannelSpec channel = ChannelSpec::make_uniform(256);
    ads::TestRng rng(2024);
    int desyncs = 0, mismatches = 0;
    for (int iter = 0; iter < 30; ++iter) {
        const SecretKey key_a = rng.next_key();
        const SecretKey key_b = rng.next_key();
        const BitString message = rng.next_bits(64);
        CodecParams params;
        params.n = 8;
        params.framed = true;
        params.stop = {StopMode::disambiguation, 0};
        const ads::EncodeResult enc = ads::encode(message, key_a, channel, {}, params);
        try {
            const ads::DecodeResult dec =
                ads::decode(enc.transcript.tokens, key_b, channel, {}, params);
            CHECK(dec.frame_status != ads::FrameStatus::complete);
            ++mismatches;
        } catch (const ads::DesyncError&) {
            ++desyncs;
        }
    }
    CHECK(desyncs + mismatches == 30);
    CHECK(desyncs > 0);  // at vocab 256 the image check fires essentially always
}

TEST_CASE("wrong key on a saturated vocabulary still never completes") {
    // 2^n candidates cover vocab 16 entirely, so desync cannot fire; the
    // wrong key must surface through the frame instead
    const ChannelSpec channel = ChannelSpec::make_uniform(16);
    ads::TestRng rng(2025);
    for (int iter = 0; iter < 20; ++iter) {
        const SecretKey key_a = rng.next_key();
        const SecretKey key_b = rng.next_key();
        const BitString message = rng.next_bits(64);
        CodecParams params;
        params.n = 8;
        params.framed = true;
        params.stop = {StopMode::disambiguation, 0};
        const ads::EncodeResult enc = ads::encode(message, key_a, channel, {}, params);
        try {
            const ads::DecodeResult dec =
                ads::decode(enc.transcript.tokens, key_b, channel, {}, params);
            CHECK(dec.frame_status != ads::FrameStatus::complete);
        } catch (const ads::DesyncError&) {
            // acceptable on the rare non-covering map
        }
    }
}

TEST_CASE("truncated transcript decodes as incomplete") {
    const ChannelSpec channel = ChannelSpec::make_uniform(256);
    ads::TestRng rng(77);
    const SecretKey key = rng.next_key();
    const BitString message = rng.next_bits(128);
    CodecParams params;
    params.n = 8;
    params.framed = true;
    params.stop = {StopMode::disambiguation, 0};
    const ads::EncodeResult enc = ads::encode(message, key, channel, {}, params);
    REQUIRE(enc.transcript.tokens.size() > 2);
    std::vector<TokenId> cut(enc.transcript.tokens.begin(), enc.transcript.tokens.end() - 2);
    const ads::DecodeResult dec = ads::decode(cut, key, channel, {}, params);
    CHECK(dec.frame_status == ads::FrameStatus::incomplete);
}

TEST_CASE("terminal guards end encoding gracefully") {
    const ChannelSpec channel = ChannelSpec::make_uniform(256);
    const SecretKey key = fixed_key(0x60);
    CodecParams params;
    params.n = 8;
    params.framed = false;
    params.stop = {StopMode::disambiguation, 0};
    params.max_prefix_bits = 32;  // long message cannot fit
    const BitString message = BitString::zeros(64);
    const ads::EncodeResult enc = ads::encode(message, key, channel, {}, params);
    CHECK(enc.reason == ads::EncodeStop::prefix_limit);
    CHECK(enc.transcript.decodable_bits < 64);

    // decoding with the same guard still replays the encoder's trajectory
    const ads::DecodeResult dec = ads::decode(enc.transcript.tokens, key, channel, {}, params);
    CHECK(dec.steps == enc.transcript.steps);

    CodecParams capped = params;
    capped.max_prefix_bits = 65536;
    capped.max_steps = 3;
    const ads::EncodeResult enc2 = ads::encode(message, key, channel, {}, capped);
    CHECK(enc2.reason == ads::EncodeStop::step_limit);
    CHECK(enc2.transcript.tokens.size() == 3);
}

TEST_CASE("parameter validation") {
    const ChannelSpec no_eot = ChannelSpec::make_uniform(16, std::nullopt);
    const SecretKey key = fixed_key(0x70);
    CodecParams params;
    params.n = 0;
    CHECK_THROWS_AS(ads::encode(BitString::from_string("1"), key, no_eot, {}, params),
                    ads::ConfigError);
    params.n = 16;
    CHECK_THROWS_AS(ads::encode(BitString::from_string("1"), key, no_eot, {}, params),
                    ads::ConfigError);
    params.n = 4;
    params.stop = {StopMode::natural_eos, 0};
    CHECK_THROWS_AS(ads::encode(BitString::from_string("1"), key, no_eot, {}, params),
                    ads::ConfigError);
    params.stop = {StopMode::disambiguation, 0};
    params.framed = false;
    CHECK_THROWS_AS(ads::encode(BitString{}, key, no_eot, {}, params), std::invalid_argument);
}

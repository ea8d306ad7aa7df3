#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ads/bitstring.hpp"
#include "ads/channel.hpp"
#include "ads/collision.hpp"
#include "ads/keystream.hpp"

namespace ads {

enum class StopMode { natural_eos, disambiguation, max_tokens };

struct StopPolicy {
    StopMode mode = StopMode::disambiguation;
    std::uint64_t budget = 0;  // max_tokens only

    static StopPolicy parse(const std::string& text);  // "eos" | "disambiguation" | "max:T"
    std::string to_string() const;
};

struct CodecParams {
    std::uint32_t n = 8;  // collision set capped at 2^n
    StopPolicy stop;
    bool framed = true;
    // Terminal guards shared by encoder and decoder.
    std::uint32_t max_prefix_bits = 65536;
    std::uint64_t max_steps = 100000;
};

struct StepRecord {
    std::uint64_t step = 0;
    std::uint32_t cs_before_filter = 0;
    std::uint32_t cs_after_filter = 0;
    std::uint32_t l_before_expand = 0;
    std::uint32_t l_after_expand = 0;
    TokenId token = 0;
    std::uint64_t cs_digest = 0;  // state digest after filter+expand

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct StegoTranscript {
    std::vector<TokenId> tokens;
    std::vector<StepRecord> steps;
    std::uint64_t embedded_bits = 0;   // final l
    std::uint64_t decodable_bits = 0;  // |shared prefix| at termination
};

enum class EncodeStop {
    eos,            // chose the channel's end-of-text token (natural_eos mode)
    disambiguated,  // shared prefix covers the payload
    token_budget,   // max_tokens exhausted
    prefix_limit,   // expansion hit max_prefix_bits below the size floor
    step_limit,     // max_steps safety cap
};

const char* to_string(EncodeStop s);

struct EncodeResult {
    StegoTranscript transcript;
    EncodeStop reason = EncodeStop::disambiguated;
};

// message is the raw payload; framing is applied internally when
// params.framed. Raw mode requires a nonempty message.
EncodeResult encode(const BitString& message, const SecretKey& key, const ChannelSpec& channel,
                    const std::vector<TokenId>& prompt, const CodecParams& params);

struct DecodeResult {
    BitString masked_prefix;   // shared prefix of the final collision set
    BitString payload_bits;    // unmasked prefix (frame bits + payload + padding)
    FrameStatus frame_status = FrameStatus::complete;
    std::optional<BitString> message;  // framed mode, status complete only
    std::vector<StepRecord> steps;
    std::uint64_t decodable_bits = 0;
};

// Requires the encoder's key, channel spec, prompt, and params. Throws
// DesyncError when a received token falls outside the step map's image.
DecodeResult decode(const std::vector<TokenId>& stego, const SecretKey& key,
                    const ChannelSpec& channel, const std::vector<TokenId>& prompt,
                    const CodecParams& params);

}  // namespace ads

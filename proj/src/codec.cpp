#include "ads/codec.hpp"

#include <stdexcept>

#include "ads/errors.hpp"

namespace ads {

StopPolicy StopPolicy::parse(const std::string& text) {
    if (text == "eos") return {StopMode::natural_eos, 0};
    if (text == "disambiguation") return {StopMode::disambiguation, 0};
    if (text.rfind("max:", 0) == 0) {
        std::uint64_t t;
        try {
            t = std::stoull(text.substr(4));
        } catch (const std::exception&) {
            throw ConfigError("bad stop policy: " + text);
        }
        if (t < 1) throw ConfigError("stop budget must be at least 1");
        return {StopMode::max_tokens, t};
    }
    throw ConfigError("bad stop policy: " + text + " (want eos|disambiguation|max:T)");
}

std::string StopPolicy::to_string() const {
    switch (mode) {
        case StopMode::natural_eos: return "eos";
        case StopMode::disambiguation: return "disambiguation";
        case StopMode::max_tokens: return "max:" + std::to_string(budget);
    }
    return "unknown";
}

const char* to_string(EncodeStop s) {
    switch (s) {
        case EncodeStop::eos: return "eos";
        case EncodeStop::disambiguated: return "disambiguated";
        case EncodeStop::token_budget: return "token-budget";
        case EncodeStop::prefix_limit: return "prefix-limit";
        case EncodeStop::step_limit: return "step-limit";
    }
    return "unknown";
}

namespace {

std::uint64_t lcp_bits(const CollisionSet& cs) {
    if (cs.size() == 1) return cs.prefix_bits;
    return cs.candidates.front().common_prefix_len(cs.candidates.back());
}

void check_params(const CodecParams& params, const ChannelSpec& channel) {
    if (params.n < kMinWindow || params.n > kMaxWindow) {
        throw ConfigError("n must be in 1..15");
    }
    if (params.stop.mode == StopMode::natural_eos && !channel.end_of_text) {
        throw ConfigError("eos stop policy needs a channel with an end-of-text token");
    }
    if (params.stop.mode == StopMode::max_tokens && params.stop.budget < 1) {
        throw ConfigError("max_tokens stop needs a budget of at least 1");
    }
    if (params.max_prefix_bits > kMaxCandidateBits) {
        throw ConfigError("max_prefix_bits above the supported maximum");
    }
}

}  // namespace

EncodeResult encode(const BitString& message, const SecretKey& key, const ChannelSpec& channel,
                    const std::vector<TokenId>& prompt, const CodecParams& params) {
    check_params(params, channel);
    if (!params.framed && message.empty()) {
        throw std::invalid_argument("encode: empty message requires framed mode");
    }

    const BitString payload = params.framed ? frame_payload(message) : message;
    const std::uint64_t target_bits = payload.size();

    BitString masked = mask(key, payload, 0);
    KeystreamReader padding(key);

    CollisionSet cs = init_collision_set(params.n);
    History history{prompt, {}};

    EncodeResult result;
    StegoTranscript& tr = result.transcript;

    for (;;) {
        // Top up the masked stream so an l-bit prefix always exists; the
        // extension is pure keystream (masked zero bits).
        while (masked.size() < cs.prefix_bits) {
            masked.push_back(padding.bit(masked.size()));
        }

        StepRecord rec;
        rec.step = cs.step;
        rec.cs_before_filter = std::uint32_t(cs.size());
        rec.l_before_expand = cs.prefix_bits;

        const StepMap map = build_step_map(cs, key, channel, history);
        const TokenId chosen = choose_token(cs, map, masked);
        tr.tokens.push_back(chosen);
        history.append(chosen);

        cs = filter(std::move(cs), map, chosen);
        rec.cs_after_filter = std::uint32_t(cs.size());

        const ExpandOutcome ex = expand(cs, params.n, params.max_prefix_bits);
        cs.step += 1;
        rec.l_after_expand = cs.prefix_bits;
        rec.token = chosen;
        rec.cs_digest = collision_set_digest(cs);
        tr.steps.push_back(rec);

        if (params.stop.mode == StopMode::natural_eos && channel.end_of_text &&
            chosen == *channel.end_of_text) {
            result.reason = EncodeStop::eos;
            break;
        }
        if (params.stop.mode == StopMode::disambiguation && lcp_bits(cs) >= target_bits) {
            result.reason = EncodeStop::disambiguated;
            break;
        }
        if (params.stop.mode == StopMode::max_tokens && tr.tokens.size() >= params.stop.budget) {
            result.reason = EncodeStop::token_budget;
            break;
        }
        if (ex.hit_prefix_limit) {
            result.reason = EncodeStop::prefix_limit;
            break;
        }
        if (tr.tokens.size() >= params.max_steps) {
            result.reason = EncodeStop::step_limit;
            break;
        }
    }

    tr.embedded_bits = cs.prefix_bits;
    tr.decodable_bits = lcp_bits(cs);
    return result;
}

DecodeResult decode(const std::vector<TokenId>& stego, const SecretKey& key,
                    const ChannelSpec& channel, const std::vector<TokenId>& prompt,
                    const CodecParams& params) {
    check_params(params, channel);

    CollisionSet cs = init_collision_set(params.n);
    History history{prompt, {}};

    DecodeResult result;
    for (const TokenId received : stego) {
        StepRecord rec;
        rec.step = cs.step;
        rec.cs_before_filter = std::uint32_t(cs.size());
        rec.l_before_expand = cs.prefix_bits;

        const StepMap map = build_step_map(cs, key, channel, history);
        if (!map.contains(received)) {
            throw DesyncError(cs.step,
                              "decode: token " + std::to_string(received) + " at step " +
                                  std::to_string(cs.step) +
                                  " is outside the step map image (wrong key or channel drift)");
        }
        history.append(received);
        cs = filter(std::move(cs), map, received);
        rec.cs_after_filter = std::uint32_t(cs.size());

        expand(cs, params.n, params.max_prefix_bits);
        cs.step += 1;
        rec.l_after_expand = cs.prefix_bits;
        rec.token = received;
        rec.cs_digest = collision_set_digest(cs);
        result.steps.push_back(rec);
    }

    result.masked_prefix = shared_prefix(cs);
    result.payload_bits = mask(key, result.masked_prefix, 0);
    result.decodable_bits = result.payload_bits.size();

    if (params.framed) {
        UnframeResult uf = unframe_payload(result.payload_bits);
        result.frame_status = uf.status;
        if (uf.status == FrameStatus::complete) {
            result.message = std::move(uf.message);
        }
    } else {
        result.frame_status = FrameStatus::complete;
    }
    return result;
}

}  // namespace ads

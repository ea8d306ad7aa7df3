#include "ads/collision.hpp"

#include <algorithm>
#include <stdexcept>

namespace ads {

CollisionSet init_collision_set(std::uint32_t n) {
    if (n < kMinWindow || n > kMaxWindow) {
        throw std::invalid_argument("init_collision_set: n must be in 1..15");
    }
    CollisionSet cs;
    cs.prefix_bits = n;
    cs.step = 0;
    const std::uint32_t count = 1u << n;
    cs.candidates.reserve(count);
    for (std::uint32_t v = 0; v < count; ++v) {
        cs.candidates.push_back(BitString::from_uint(v, n));
    }
    return cs;
}

bool StepMap::contains(TokenId t) const {
    return std::find(tokens.begin(), tokens.end(), t) != tokens.end();
}

StepMap build_step_map(const CollisionSet& cs, const SecretKey& key, const ChannelSpec& channel,
                       const History& history) {
    if (cs.candidates.empty()) {
        throw std::invalid_argument("build_step_map: empty collision set");
    }
    StepMap map;
    map.tokens.reserve(cs.size());

    // Whole bytes common to every candidate; sorted set, so first vs last.
    const std::size_t lcp_bits =
        cs.size() == 1 ? cs.prefix_bits
                       : cs.candidates.front().common_prefix_len(cs.candidates.back());
    const std::size_t shared_bytes = lcp_bits / 8;
    const Sha256 mid = seed_hash_begin_step(
        key, cs.step, cs.prefix_bits,
        std::span<const std::uint8_t>(cs.candidates.front().bytes().data(), shared_bytes));

    for (const BitString& e : cs.candidates) {
        const auto& bytes = e.bytes();
        const Seed seed = seed_hash_finish_candidate(
            key, mid,
            std::span<const std::uint8_t>(bytes.data() + shared_bytes,
                                          bytes.size() - shared_bytes));
        map.tokens.push_back(sample(channel, seed, history));
    }
    return map;
}

TokenId choose_token(const CollisionSet& cs, const StepMap& map, const BitString& masked_message) {
    if (masked_message.size() < cs.prefix_bits) {
        throw std::logic_error("choose_token: message shorter than current prefix length");
    }
    const BitString target = masked_message.prefix(cs.prefix_bits);
    const auto it = std::lower_bound(cs.candidates.begin(), cs.candidates.end(), target);
    if (it == cs.candidates.end() || !(*it == target)) {
        throw std::logic_error("choose_token: message prefix not in collision set");
    }
    return map.tokens[std::size_t(it - cs.candidates.begin())];
}

CollisionSet filter(CollisionSet cs, const StepMap& map, TokenId chosen) {
    if (map.tokens.size() != cs.size()) {
        throw std::logic_error("filter: map does not match collision set");
    }
    std::size_t out = 0;
    for (std::size_t i = 0; i < cs.candidates.size(); ++i) {
        if (map.tokens[i] == chosen) {
            if (out != i) cs.candidates[out] = std::move(cs.candidates[i]);
            ++out;
        }
    }
    if (out == 0) {
        throw std::logic_error("filter: chosen token not in map image");
    }
    cs.candidates.resize(out);
    return cs;
}

ExpandOutcome expand(CollisionSet& cs, std::uint32_t n, std::uint32_t max_prefix_bits) {
    if (cs.candidates.empty()) {
        throw std::invalid_argument("expand: empty collision set");
    }
    ExpandOutcome outcome;
    const std::size_t limit = std::size_t(1) << n;
    const std::size_t threshold = std::max<std::size_t>(std::size_t(1) << (n - 1), 2);
    if (cs.size() >= threshold) return outcome;

    while (cs.size() * 2 <= limit) {
        if (cs.prefix_bits + 1 > max_prefix_bits) {
            outcome.hit_prefix_limit = cs.size() < threshold;
            return outcome;
        }
        std::vector<BitString> doubled;
        doubled.reserve(cs.size() * 2);
        for (BitString& e : cs.candidates) {
            BitString one = e;
            one.push_back(true);
            e.push_back(false);
            doubled.push_back(std::move(e));
            doubled.push_back(std::move(one));
        }
        cs.candidates = std::move(doubled);
        cs.prefix_bits += 1;
        outcome.bits_added += 1;
    }
    return outcome;
}

BitString shared_prefix(const CollisionSet& cs) {
    if (cs.candidates.empty()) {
        throw std::invalid_argument("shared_prefix: empty collision set");
    }
    if (cs.size() == 1) return cs.candidates.front();
    const std::size_t lcp =
        cs.candidates.front().common_prefix_len(cs.candidates.back());
    return cs.candidates.front().prefix(lcp);
}

std::uint64_t collision_set_digest(const CollisionSet& cs) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xFF;
            h *= 0x100000001b3ULL;
        }
    };
    mix(cs.prefix_bits);
    mix(cs.size());
    for (const BitString& e : cs.candidates) {
        for (std::uint8_t b : e.bytes()) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
        mix(0x5eedULL);  // separator
    }
    return h;
}

}  // namespace ads

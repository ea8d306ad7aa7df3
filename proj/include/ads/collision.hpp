#pragma once

#include <cstdint>
#include <vector>

#include "ads/bitstring.hpp"
#include "ads/channel.hpp"
#include "ads/keystream.hpp"

namespace ads {

// The candidate message prefixes still consistent with every stego token
// emitted so far. Candidates are distinct, share one length (prefix_bits),
// and stay in strictly ascending lexicographic order; encoder and decoder
// must iterate and derive seeds in the same order, and this ordering is
// that contract.
struct CollisionSet {
    std::vector<BitString> candidates;
    std::uint32_t prefix_bits = 0;  // l, current embedded-prefix length
    std::uint64_t step = 0;         // i

    std::size_t size() const { return candidates.size(); }
};

inline constexpr std::uint32_t kMinWindow = 1;
inline constexpr std::uint32_t kMaxWindow = 15;

// All 2^n n-bit strings in ascending order; l = n, step = 0.
CollisionSet init_collision_set(std::uint32_t n);

// Per-step candidate-to-token assignment; parallel to cs.candidates.
struct StepMap {
    std::vector<TokenId> tokens;

    bool contains(TokenId t) const;
};

// One channel query per candidate, in canonical order, with seeds derived
// from (key, cs.step, candidate). Candidates share their leading bytes, so
// the hash midstate over the shared prefix is computed once.
StepMap build_step_map(const CollisionSet& cs, const SecretKey& key, const ChannelSpec& channel,
                       const History& history);

// Token assigned to the masked message's current l-bit prefix. The prefix is
// guaranteed to be a candidate by the state machine; absence is state
// corruption and throws std::logic_error.
TokenId choose_token(const CollisionSet& cs, const StepMap& map, const BitString& masked_message);

// Keep exactly the candidates mapping to `chosen`, order preserved.
CollisionSet filter(CollisionSet cs, const StepMap& map, TokenId chosen);

struct ExpandOutcome {
    std::uint32_t bits_added = 0;
    // Expansion stopped short of the size floor because prefix_bits hit the
    // configured maximum; the codec treats this as a terminal state.
    bool hit_prefix_limit = false;
};

// Doubling rule: when |CS| has fallen below 2^(n-1), append 0 and 1 to every
// candidate while the doubled size still fits within 2^n. A singleton set
// always expands at least once (the n=1 floor). Each doubling advances
// prefix_bits by one, never past max_prefix_bits.
ExpandOutcome expand(CollisionSet& cs, std::uint32_t n, std::uint32_t max_prefix_bits);

// Longest common prefix of all candidates: the bits the receiver can already
// read off regardless of which candidate is the real message.
BitString shared_prefix(const CollisionSet& cs);

// Order-sensitive digest of (prefix_bits, candidates); lets paired runs check
// state-trajectory equality cheaply.
std::uint64_t collision_set_digest(const CollisionSet& cs);

}  // namespace ads

#pragma once

#include <string>

#include "ads/channel.hpp"

namespace ads {

// One sample = one POST with a JSON body carrying the history, the 64-bit
// seed, max_new_tokens=1, temperature=1.0, top_p=1.0 under config-mapped
// field names. The response carries one token id (or one token string
// resolved against the declared vocabulary).
//
// With self_check enabled every query is issued twice; disagreeing answers
// mean the endpoint is not seed-deterministic and the channel is unusable.
TokenId sample_remote(const RemoteConfig& cfg, std::uint32_t vocab_size, Seed seed,
                      const History& history);

// Request/response mapping, separated from transport for testability.
std::string build_remote_request_body(const RemoteConfig& cfg, Seed seed, const History& history);
TokenId parse_remote_response_body(const RemoteConfig& cfg, std::uint32_t vocab_size,
                                   const std::string& body);

}  // namespace ads

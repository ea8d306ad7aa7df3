#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ads/keystream.hpp"

namespace ads {

using TokenId = std::uint32_t;

// Fixed prompt plus the tokens generated so far; append-only during a run.
struct History {
    std::vector<TokenId> prompt;
    std::vector<TokenId> generated;

    std::size_t size() const { return prompt.size() + generated.size(); }
    bool empty() const { return prompt.empty() && generated.empty(); }
    std::optional<TokenId> last() const {
        if (!generated.empty()) return generated.back();
        if (!prompt.empty()) return prompt.back();
        return std::nullopt;
    }
    std::vector<TokenId> joined() const;
    void append(TokenId t) { generated.push_back(t); }
};

enum class ChannelKind { uniform, markov, remote, replay };

const char* to_string(ChannelKind k);

struct ReplayEntry {
    std::uint64_t seed = 0;
    std::vector<TokenId> history;  // full prompt+generated sequence of the query
    TokenId token = 0;
};

// Endpoint mapping for the remote backend. Field names, URL and the auth
// header are configuration, never hard-coded; the auth header's value is read
// verbatim from the named environment variable.
struct RemoteConfig {
    std::string url;
    std::string auth_header = "Authorization";
    std::string auth_env;
    std::string prompt_field = "prompt";
    std::string seed_field = "seed";
    std::string max_new_tokens_field = "max_new_tokens";
    std::string temperature_field = "temperature";
    std::string top_p_field = "top_p";
    std::string response_field = "token_id";
    bool prompt_as_text = false;
    std::vector<std::string> vocab;  // token strings, for string responses
    bool self_check = true;          // issue each query twice, compare
    int timeout_seconds = 30;
};

struct ChannelSpec {
    ChannelKind kind = ChannelKind::uniform;
    std::uint32_t vocab_size = 2;
    std::optional<TokenId> end_of_text;

    // markov payload: initial row plus row-major vocab x vocab table
    std::vector<double> initial_row;
    std::vector<double> transition;

    std::vector<ReplayEntry> script;

    RemoteConfig remote;

    // end_of_text defaults to the highest id; pass nullopt to disable it
    // (infinite stream, for token-budget runs).
    static ChannelSpec make_uniform(std::uint32_t vocab_size);
    static ChannelSpec make_uniform(std::uint32_t vocab_size, std::optional<TokenId> end_of_text);
    static ChannelSpec make_markov(std::vector<double> initial_row,
                                   std::vector<double> transition,
                                   std::optional<TokenId> end_of_text = std::nullopt);
    static ChannelSpec make_replay(std::uint32_t vocab_size, std::vector<ReplayEntry> script,
                                   std::optional<TokenId> end_of_text = std::nullopt);
};

// Pinned seed-to-uniform map: u = value / 2^64.
inline double seed_to_unit(Seed s) {
    return std::ldexp(double(s.value), -64);
}

// Pinned inverse CDF: cumulative sums accumulated in ascending index order,
// token = smallest j with cumulative(j) > u (ties go to the higher index).
TokenId inverse_cdf_pick(std::span<const double> probs, double u);

// Deterministic in (spec, seed, history) for every backend except remote,
// where determinism is only verified, not guaranteed.
TokenId sample(const ChannelSpec& spec, Seed seed, const History& history);

// Explicit next-token distribution; uniform/markov only.
std::vector<double> next_distribution(const ChannelSpec& spec, const History& history);

// "ads-channel/1" text container.
ChannelSpec load_channel(std::istream& in);
ChannelSpec load_channel_file(const std::filesystem::path& path);
void save_channel(std::ostream& out, const ChannelSpec& spec);
std::string serialize_channel(const ChannelSpec& spec);

// SHA-256 hex of the canonical serialization; binds transcripts to a channel.
std::string channel_hash(const ChannelSpec& spec);

// Row-stochastic validation used by loaders and factories.
void validate_channel(const ChannelSpec& spec);

inline constexpr double kRowSumTolerance = 1e-12;

}  // namespace ads

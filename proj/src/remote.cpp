#include "ads/remote.hpp"

#include <algorithm>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "ads/errors.hpp"

namespace ads {

using nlohmann::json;

std::string build_remote_request_body(const RemoteConfig& cfg, Seed seed, const History& history) {
    json body;
    if (cfg.prompt_as_text) {
        std::string text;
        for (TokenId t : history.joined()) {
            if (t >= cfg.vocab.size()) {
                throw ChannelError(ChannelError::Kind::transport,
                                   "remote: history token has no vocabulary string");
            }
            text += cfg.vocab[t];
        }
        body[cfg.prompt_field] = text;
    } else {
        body[cfg.prompt_field] = history.joined();
    }
    body[cfg.seed_field] = seed.value;
    body[cfg.max_new_tokens_field] = 1;
    body[cfg.temperature_field] = 1.0;
    body[cfg.top_p_field] = 1.0;
    return body.dump();
}

TokenId parse_remote_response_body(const RemoteConfig& cfg, std::uint32_t vocab_size,
                                   const std::string& body) {
    json parsed;
    try {
        parsed = json::parse(body);
    } catch (const json::exception& e) {
        throw ChannelError(ChannelError::Kind::transport,
                           std::string("remote: unparseable response: ") + e.what());
    }
    if (!parsed.contains(cfg.response_field)) {
        throw ChannelError(ChannelError::Kind::transport,
                           "remote: response lacks field '" + cfg.response_field + "'");
    }
    const json& v = parsed[cfg.response_field];
    TokenId token;
    if (v.is_number_unsigned() || v.is_number_integer()) {
        const std::int64_t id = v.get<std::int64_t>();
        if (id < 0) {
            throw ChannelError(ChannelError::Kind::transport, "remote: negative token id");
        }
        token = TokenId(id);
    } else if (v.is_string()) {
        const std::string s = v.get<std::string>();
        auto it = std::find(cfg.vocab.begin(), cfg.vocab.end(), s);
        if (it == cfg.vocab.end()) {
            throw ChannelError(ChannelError::Kind::transport,
                               "remote: token string not in declared vocabulary: " + s);
        }
        token = TokenId(it - cfg.vocab.begin());
    } else {
        throw ChannelError(ChannelError::Kind::transport,
                           "remote: response field is neither id nor string");
    }
    if (token >= vocab_size) {
        throw ChannelError(ChannelError::Kind::transport, "remote: token id outside vocabulary");
    }
    return token;
}

namespace {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // /path...
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("remote url must include a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

TokenId query_once(const RemoteConfig& cfg, std::uint32_t vocab_size, const std::string& body) {
    const SplitUrl u = split_url(cfg.url);
    httplib::Client client(u.base);
    client.set_connection_timeout(cfg.timeout_seconds);
    client.set_read_timeout(cfg.timeout_seconds);

    httplib::Headers headers;
    if (!cfg.auth_env.empty()) {
        const char* token = std::getenv(cfg.auth_env.c_str());
        if (token == nullptr) {
            throw ConfigError("remote auth env var not set: " + cfg.auth_env);
        }
        headers.emplace(cfg.auth_header, token);
    }
    auto res = client.Post(u.path, headers, body, "application/json");
    if (!res) {
        throw ChannelError(ChannelError::Kind::transport,
                           "remote: request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw ChannelError(ChannelError::Kind::transport,
                           "remote: HTTP status " + std::to_string(res->status));
    }
    return parse_remote_response_body(cfg, vocab_size, res->body);
}

}  // namespace

TokenId sample_remote(const RemoteConfig& cfg, std::uint32_t vocab_size, Seed seed,
                      const History& history) {
    if (cfg.url.empty()) {
        throw ConfigError("remote channel has no endpoint url configured");
    }
    const std::string body = build_remote_request_body(cfg, seed, history);
    const TokenId first = query_once(cfg, vocab_size, body);
    if (cfg.self_check) {
        const TokenId second = query_once(cfg, vocab_size, body);
        if (second != first) {
            throw ChannelError(ChannelError::Kind::channel_unusable,
                               "remote: two queries with the same (seed, history) disagree; "
                               "endpoint is not seed-deterministic");
        }
    }
    return first;
}

}  // namespace ads

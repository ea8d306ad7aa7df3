#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ads {

// Channel backends signal failures through one exception type so callers can
// map them to a single exit path.
class ChannelError : public std::runtime_error {
public:
    enum class Kind {
        transport,                 // remote request failed
        channel_unusable,          // remote self-check saw two different answers
        replay_miss,               // scripted channel queried off-script
        distribution_unavailable,  // kind has no explicit next-token distribution
        bad_format,                // channel file rejected
    };

    ChannelError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Decoder state diverged: a received token is outside the current step map's
// image. Wrong key or channel drift; resynchronization is not possible.
class DesyncError : public std::runtime_error {
public:
    DesyncError(std::uint64_t step, const std::string& what)
        : std::runtime_error(what), step_(step) {}
    std::uint64_t step() const { return step_; }

private:
    std::uint64_t step_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ads

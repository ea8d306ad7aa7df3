#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ads/channel.hpp"
#include "ads/codec.hpp"
#include "ads/stats.hpp"

namespace ads {

// Deterministic splitmix64 stream for the statistical suites. Trial inputs
// are derived from (seed, stream, trial index), so reports do not depend on
// thread count.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double unit01() { return double(next() >> 11) * 0x1.0p-53; }
    std::uint64_t below(std::uint64_t bound);
    SecretKey next_key();
    BitString next_bits(std::size_t nbits);

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

private:
    std::uint64_t state_;
};

struct RunMetrics {
    double entropy_per_token = 0.0;  // explicit-distribution channels only
    double embed_rate = 0.0;         // decoded bits per emitted token
    double utilization = 0.0;        // embed_rate / entropy
    double success_rate = 0.0;
    std::uint64_t tokens_emitted = 0;
    double wall_time_per_token = 0.0;  // seconds
};

// Fraction of original positions decoded correctly; missing decoded bits
// count as mismatches. Original must be nonempty.
double success_rate(const BitString& original, const BitString& decoded);

// decodable_bits / tokens_emitted.
double embed_rate(const StegoTranscript& transcript);

// unique n-grams / total n-grams; requires 1 <= n <= |tokens|.
double distinct_n(std::span<const TokenId> tokens, std::uint32_t n);

// Mean positional Shannon entropy along a generated trajectory.
double run_entropy(const ChannelSpec& spec, std::span<const TokenId> prompt,
                   std::span<const TokenId> tokens);

// exp of mean negative log-likelihood along a trajectory (informational).
double run_ppl(const ChannelSpec& spec, std::span<const TokenId> prompt,
               std::span<const TokenId> tokens);

struct DistributionTestReport {
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> counts;
    std::vector<double> expected;
    double tv = 0.0;
    ChiSquareResult gof;
};

// Single-step stego-token distribution over fresh random keys and messages
// versus the channel's next-token distribution. Explicit-distribution
// channels with vocab <= 64 only.
DistributionTestReport distribution_preservation_test(const ChannelSpec& spec,
                                                      const std::vector<TokenId>& prompt,
                                                      std::uint32_t n, std::uint64_t trials,
                                                      std::uint64_t test_seed,
                                                      unsigned threads = 0);

struct GameTestReport {
    std::uint64_t trials_per_arm = 0;
    std::vector<std::uint64_t> real_counts;     // message-driven encoder
    std::vector<std::uint64_t> uniform_counts;  // uniform-candidate encoder
    ChiSquareResult two_sample;
};

// Real encoder (random messages) against the test-only uniform-candidate
// variant; two-sample chi-square on the chosen-token histograms.
GameTestReport game_equivalence_test(const ChannelSpec& spec, const std::vector<TokenId>& prompt,
                                     std::uint32_t n, std::uint64_t trials_per_arm,
                                     std::uint64_t test_seed, unsigned threads = 0);

struct SweepRow {
    std::uint32_t n = 0;
    double mean_embed_rate = 0.0;
    double max_embed_rate = 0.0;
    double mean_wall_time_per_token = 0.0;  // seconds
    double channel_entropy = 0.0;
};

// Fixed-token-budget capacity measurement per window size. Raw mode, random
// messages long enough that padding never kicks in.
std::vector<SweepRow> capacity_sweep(const ChannelSpec& spec, std::span<const std::uint32_t> n_list,
                                     std::uint32_t message_len_bits, std::uint32_t repetitions,
                                     std::uint64_t token_budget, std::uint64_t test_seed);

// "ads-report/1" CSV containers.
void write_sweep_report(std::ostream& out, std::span<const SweepRow> rows);

struct ReportRow {
    std::string metric;
    double value = 0.0;
    std::string details;
};

void write_eval_report(std::ostream& out, std::span<const ReportRow> rows);

}  // namespace ads

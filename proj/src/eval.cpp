#include "ads/eval.hpp"

#include "ads/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

namespace ads {

std::uint64_t TestRng::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t TestRng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("TestRng::below: zero bound");
    if ((bound & (bound - 1)) == 0) return next() & (bound - 1);
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % bound;
}

SecretKey TestRng::next_key() {
    std::array<std::uint8_t, 32> b;
    for (std::size_t i = 0; i < 4; ++i) {
        const std::uint64_t v = next();
        for (std::size_t j = 0; j < 8; ++j) b[8 * i + j] = std::uint8_t(v >> (56 - 8 * j));
    }
    return SecretKey(b);
}

BitString TestRng::next_bits(std::size_t nbits) {
    BitString out = BitString::zeros(nbits);
    for (std::size_t i = 0; i < nbits; i += 64) {
        std::uint64_t v = next();
        const std::size_t chunk = std::min<std::size_t>(64, nbits - i);
        for (std::size_t j = 0; j < chunk; ++j) {
            out.set_bit(i + j, (v >> (63 - j)) & 1u);
        }
    }
    return out;
}

std::uint64_t TestRng::mix(std::uint64_t a, std::uint64_t b) {
    TestRng r(a ^ (b * 0x9E3779B97F4A7C15ULL + 0x6C62272E07BB0142ULL));
    return r.next();
}

double success_rate(const BitString& original, const BitString& decoded) {
    if (original.empty()) throw std::invalid_argument("success_rate: empty original");
    std::size_t equal = 0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        if (i < decoded.size() && decoded.bit(i) == original.bit(i)) ++equal;
    }
    return double(equal) / double(original.size());
}

double embed_rate(const StegoTranscript& transcript) {
    if (transcript.tokens.empty()) throw std::invalid_argument("embed_rate: empty transcript");
    return double(transcript.decodable_bits) / double(transcript.tokens.size());
}

double distinct_n(std::span<const TokenId> tokens, std::uint32_t n) {
    if (n < 1) throw std::invalid_argument("distinct_n: n must be positive");
    if (n > tokens.size()) throw std::invalid_argument("distinct_n: n exceeds sequence length");
    std::set<std::vector<TokenId>> unique;
    const std::size_t total = tokens.size() - n + 1;
    for (std::size_t i = 0; i < total; ++i) {
        unique.emplace(tokens.begin() + std::ptrdiff_t(i), tokens.begin() + std::ptrdiff_t(i + n));
    }
    return double(unique.size()) / double(total);
}

double run_entropy(const ChannelSpec& spec, std::span<const TokenId> prompt,
                   std::span<const TokenId> tokens) {
    if (tokens.empty()) throw std::invalid_argument("run_entropy: empty trajectory");
    History h{{prompt.begin(), prompt.end()}, {}};
    double sum = 0.0;
    for (TokenId t : tokens) {
        sum += entropy_bits(next_distribution(spec, h));
        h.append(t);
    }
    return sum / double(tokens.size());
}

double run_ppl(const ChannelSpec& spec, std::span<const TokenId> prompt,
               std::span<const TokenId> tokens) {
    if (tokens.empty()) throw std::invalid_argument("run_ppl: empty trajectory");
    History h{{prompt.begin(), prompt.end()}, {}};
    double nll = 0.0;
    for (TokenId t : tokens) {
        const auto dist = next_distribution(spec, h);
        const double p = t < dist.size() ? dist[t] : 0.0;
        nll += p > 0.0 ? -std::log(p) : 1e9;
        h.append(t);
    }
    return std::exp(nll / double(tokens.size()));
}

namespace {

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw != 0 ? hw : 1;
}

// Runs body(trial, counts) over [0, trials) across threads; each thread owns
// a counts vector, summed afterwards. Trial derivation keys off the index, so
// the partition does not affect results.
template <typename Body>
std::vector<std::uint64_t> parallel_counts(std::uint64_t trials, std::size_t bins,
                                           unsigned threads, const Body& body) {
    const unsigned nthreads = std::max(1u, resolve_threads(threads));
    std::vector<std::vector<std::uint64_t>> partial(nthreads,
                                                    std::vector<std::uint64_t>(bins, 0));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w] {
            for (std::uint64_t t = w; t < trials; t += nthreads) {
                body(t, partial[w]);
            }
        });
    }
    for (auto& th : pool) th.join();
    std::vector<std::uint64_t> counts(bins, 0);
    for (const auto& p : partial) {
        for (std::size_t i = 0; i < bins; ++i) counts[i] += p[i];
    }
    return counts;
}

constexpr std::uint64_t kDistStream = 0x64697374ULL;     // distribution arm
constexpr std::uint64_t kGameRealStream = 0x7265616cULL; // game, real arm
constexpr std::uint64_t kGameUnifStream = 0x756e6966ULL; // game, uniform arm
constexpr std::uint64_t kSweepStream = 0x73777065ULL;

void check_explicit_small(const ChannelSpec& spec) {
    if (spec.kind != ChannelKind::uniform && spec.kind != ChannelKind::markov) {
        throw ChannelError(ChannelError::Kind::distribution_unavailable,
                           "statistical tests need an explicit-distribution channel");
    }
    if (spec.vocab_size > 64) {
        throw std::invalid_argument("statistical tests support vocab sizes up to 64");
    }
}

}  // namespace

DistributionTestReport distribution_preservation_test(const ChannelSpec& spec,
                                                      const std::vector<TokenId>& prompt,
                                                      std::uint32_t n, std::uint64_t trials,
                                                      std::uint64_t test_seed, unsigned threads) {
    check_explicit_small(spec);
    const History history{prompt, {}};
    const CollisionSet cs0 = init_collision_set(n);

    DistributionTestReport report;
    report.trials = trials;
    report.expected = next_distribution(spec, history);
    report.counts = parallel_counts(
        trials, spec.vocab_size, threads, [&](std::uint64_t trial, std::vector<std::uint64_t>& c) {
            TestRng rng(TestRng::mix(test_seed, kDistStream ^ trial * 0x2545F4914F6CDD1DULL));
            const SecretKey key = rng.next_key();
            const BitString message = rng.next_bits(n);
            const StepMap map = build_step_map(cs0, key, spec, history);
            const TokenId token = choose_token(cs0, map, mask(key, message, 0));
            c[token] += 1;
        });
    report.tv = tv_distance(report.counts, report.expected);
    report.gof = chi_square_gof(report.counts, report.expected);
    return report;
}

GameTestReport game_equivalence_test(const ChannelSpec& spec, const std::vector<TokenId>& prompt,
                                     std::uint32_t n, std::uint64_t trials_per_arm,
                                     std::uint64_t test_seed, unsigned threads) {
    check_explicit_small(spec);
    const History history{prompt, {}};
    const CollisionSet cs0 = init_collision_set(n);

    GameTestReport report;
    report.trials_per_arm = trials_per_arm;
    report.real_counts = parallel_counts(
        trials_per_arm, spec.vocab_size, threads,
        [&](std::uint64_t trial, std::vector<std::uint64_t>& c) {
            TestRng rng(TestRng::mix(test_seed, kGameRealStream ^ trial * 0x2545F4914F6CDD1DULL));
            const SecretKey key = rng.next_key();
            const BitString message = rng.next_bits(n);
            const StepMap map = build_step_map(cs0, key, spec, history);
            c[choose_token(cs0, map, mask(key, message, 0))] += 1;
        });
    report.uniform_counts = parallel_counts(
        trials_per_arm, spec.vocab_size, threads,
        [&](std::uint64_t trial, std::vector<std::uint64_t>& c) {
            TestRng rng(TestRng::mix(test_seed, kGameUnifStream ^ trial * 0x2545F4914F6CDD1DULL));
            const SecretKey key = rng.next_key();
            const StepMap map = build_step_map(cs0, key, spec, history);
            c[map.tokens[rng.below(cs0.size())]] += 1;
        });
    report.two_sample = chi_square_two_sample(report.real_counts, report.uniform_counts);
    return report;
}

std::vector<SweepRow> capacity_sweep(const ChannelSpec& spec, std::span<const std::uint32_t> n_list,
                                     std::uint32_t message_len_bits, std::uint32_t repetitions,
                                     std::uint64_t token_budget, std::uint64_t test_seed) {
    if (spec.kind != ChannelKind::uniform && spec.kind != ChannelKind::markov) {
        throw ChannelError(ChannelError::Kind::distribution_unavailable,
                           "capacity sweep needs an explicit-distribution channel");
    }
    if (repetitions == 0 || token_budget == 0) {
        throw std::invalid_argument("capacity_sweep: repetitions and token budget must be positive");
    }
    const double entropy = entropy_bits(next_distribution(spec, History{}));

    std::vector<SweepRow> rows;
    rows.reserve(n_list.size());
    for (const std::uint32_t n : n_list) {
        CodecParams params;
        params.n = n;
        params.stop = {StopMode::max_tokens, token_budget};
        params.framed = false;

        double rate_sum = 0.0, rate_max = 0.0, seconds_per_token_sum = 0.0;
        for (std::uint32_t rep = 0; rep < repetitions; ++rep) {
            TestRng rng(TestRng::mix(test_seed, kSweepStream ^ (std::uint64_t(n) << 32 | rep)));
            const SecretKey key = rng.next_key();
            const BitString message = rng.next_bits(message_len_bits);

            const auto t0 = std::chrono::steady_clock::now();
            const EncodeResult enc = encode(message, key, spec, {}, params);
            const auto t1 = std::chrono::steady_clock::now();

            const double rate = embed_rate(enc.transcript);
            rate_sum += rate;
            rate_max = std::max(rate_max, rate);
            seconds_per_token_sum += std::chrono::duration<double>(t1 - t0).count() /
                                     double(enc.transcript.tokens.size());
        }
        rows.push_back({n, rate_sum / repetitions, rate_max, seconds_per_token_sum / repetitions,
                        entropy});
    }
    return rows;
}

namespace {

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_sweep_report(std::ostream& out, std::span<const SweepRow> rows) {
    out << "ads-report/1\n";
    out << "n,embed_rate_bits_per_token,max_embed_rate_bits_per_token,"
           "wall_seconds_per_token,entropy_bits_per_token\n";
    for (const SweepRow& r : rows) {
        out << r.n << ',' << csv_double(r.mean_embed_rate) << ',' << csv_double(r.max_embed_rate)
            << ',' << csv_double(r.mean_wall_time_per_token) << ','
            << csv_double(r.channel_entropy) << "\n";
    }
}

void write_eval_report(std::ostream& out, std::span<const ReportRow> rows) {
    out << "ads-report/1\n";
    out << "metric,value,details\n";
    for (const ReportRow& r : rows) {
        out << r.metric << ',' << csv_double(r.value) << ',' << r.details << "\n";
    }
}

}  // namespace ads

#include "ads/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ads/errors.hpp"
#include "ads/remote.hpp"

namespace ads {

std::vector<TokenId> History::joined() const {
    std::vector<TokenId> all;
    all.reserve(prompt.size() + generated.size());
    all.insert(all.end(), prompt.begin(), prompt.end());
    all.insert(all.end(), generated.begin(), generated.end());
    return all;
}

const char* to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::uniform: return "uniform";
        case ChannelKind::markov: return "markov";
        case ChannelKind::remote: return "remote";
        case ChannelKind::replay: return "replay";
    }
    return "unknown";
}

static ChannelKind kind_from_string(const std::string& s) {
    if (s == "uniform") return ChannelKind::uniform;
    if (s == "markov") return ChannelKind::markov;
    if (s == "remote") return ChannelKind::remote;
    if (s == "replay") return ChannelKind::replay;
    throw ChannelError(ChannelError::Kind::bad_format, "unknown channel kind: " + s);
}

ChannelSpec ChannelSpec::make_uniform(std::uint32_t vocab_size) {
    return make_uniform(vocab_size, vocab_size > 0 ? std::optional<TokenId>(vocab_size - 1)
                                                   : std::nullopt);
}

ChannelSpec ChannelSpec::make_uniform(std::uint32_t vocab_size, std::optional<TokenId> end_of_text) {
    ChannelSpec spec;
    spec.kind = ChannelKind::uniform;
    spec.vocab_size = vocab_size;
    spec.end_of_text = end_of_text;
    validate_channel(spec);
    return spec;
}

ChannelSpec ChannelSpec::make_markov(std::vector<double> initial_row, std::vector<double> transition,
                                     std::optional<TokenId> end_of_text) {
    ChannelSpec spec;
    spec.kind = ChannelKind::markov;
    spec.vocab_size = std::uint32_t(initial_row.size());
    spec.end_of_text = end_of_text;
    spec.initial_row = std::move(initial_row);
    spec.transition = std::move(transition);
    validate_channel(spec);
    return spec;
}

ChannelSpec ChannelSpec::make_replay(std::uint32_t vocab_size, std::vector<ReplayEntry> script,
                                     std::optional<TokenId> end_of_text) {
    ChannelSpec spec;
    spec.kind = ChannelKind::replay;
    spec.vocab_size = vocab_size;
    spec.end_of_text = end_of_text;
    spec.script = std::move(script);
    validate_channel(spec);
    return spec;
}

static void check_row(const std::vector<double>& row, std::uint32_t vocab, const char* what) {
    if (row.size() != vocab) {
        throw ChannelError(ChannelError::Kind::bad_format,
                           std::string(what) + ": expected " + std::to_string(vocab) + " entries");
    }
    double sum = 0.0;
    for (double p : row) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ChannelError(ChannelError::Kind::bad_format,
                               std::string(what) + ": negative or non-finite probability");
        }
        sum += p;
    }
    if (std::fabs(sum - 1.0) > kRowSumTolerance) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", sum);
        throw ChannelError(ChannelError::Kind::bad_format,
                           std::string(what) + ": row sums to " + buf + ", not 1");
    }
}

void validate_channel(const ChannelSpec& spec) {
    if (spec.vocab_size < 2) {
        throw ChannelError(ChannelError::Kind::bad_format, "vocab_size must be at least 2");
    }
    if (spec.end_of_text && *spec.end_of_text >= spec.vocab_size) {
        throw ChannelError(ChannelError::Kind::bad_format, "end_of_text id outside vocabulary");
    }
    if (spec.kind == ChannelKind::markov) {
        check_row(spec.initial_row, spec.vocab_size, "initial row");
        if (spec.transition.size() != std::size_t(spec.vocab_size) * spec.vocab_size) {
            throw ChannelError(ChannelError::Kind::bad_format, "transition table size mismatch");
        }
        for (std::uint32_t r = 0; r < spec.vocab_size; ++r) {
            const std::vector<double> row(spec.transition.begin() + std::ptrdiff_t(r) * spec.vocab_size,
                                          spec.transition.begin() + std::ptrdiff_t(r + 1) * spec.vocab_size);
            check_row(row, spec.vocab_size, ("row " + std::to_string(r)).c_str());
        }
    }
    for (const ReplayEntry& e : spec.script) {
        if (e.token >= spec.vocab_size) {
            throw ChannelError(ChannelError::Kind::bad_format, "replay output token outside vocabulary");
        }
        for (TokenId t : e.history) {
            if (t >= spec.vocab_size) {
                throw ChannelError(ChannelError::Kind::bad_format,
                                   "replay history token outside vocabulary");
            }
        }
    }
}

TokenId inverse_cdf_pick(std::span<const double> probs, double u) {
    double cumulative = 0.0;
    std::size_t last_nonzero = probs.size() - 1;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        cumulative += probs[j];
        if (cumulative > u) return TokenId(j);
        if (probs[j] > 0.0) last_nonzero = j;
    }
    // u at or past the accumulated total (seed quantization rounding to 1.0);
    // never emit a zero-probability token.
    return TokenId(last_nonzero);
}

static const double* markov_row_ptr(const ChannelSpec& spec, const History& history) {
    const auto last = history.last();
    if (!last) return spec.initial_row.data();
    if (*last >= spec.vocab_size) {
        throw std::invalid_argument("history token outside vocabulary");
    }
    return spec.transition.data() + std::size_t(*last) * spec.vocab_size;
}

TokenId sample(const ChannelSpec& spec, Seed seed, const History& history) {
    switch (spec.kind) {
        case ChannelKind::uniform: {
            const double u = seed_to_unit(seed);
            const double p = 1.0 / double(spec.vocab_size);
            double cumulative = 0.0;
            for (std::uint32_t j = 0; j < spec.vocab_size; ++j) {
                cumulative += p;
                if (cumulative > u) return j;
            }
            return spec.vocab_size - 1;
        }
        case ChannelKind::markov: {
            const double* row = markov_row_ptr(spec, history);
            return inverse_cdf_pick({row, spec.vocab_size}, seed_to_unit(seed));
        }
        case ChannelKind::replay: {
            const std::vector<TokenId> h = history.joined();
            for (const ReplayEntry& e : spec.script) {
                if (e.seed == seed.value && e.history == h) return e.token;
            }
            throw ChannelError(ChannelError::Kind::replay_miss,
                               "replay script has no entry for this (seed, history) query");
        }
        case ChannelKind::remote:
            return sample_remote(spec.remote, spec.vocab_size, seed, history);
    }
    throw std::logic_error("sample: bad channel kind");
}

std::vector<double> next_distribution(const ChannelSpec& spec, const History& history) {
    switch (spec.kind) {
        case ChannelKind::uniform:
            return std::vector<double>(spec.vocab_size, 1.0 / double(spec.vocab_size));
        case ChannelKind::markov: {
            const double* row = markov_row_ptr(spec, history);
            return std::vector<double>(row, row + spec.vocab_size);
        }
        case ChannelKind::remote:
        case ChannelKind::replay:
            throw ChannelError(ChannelError::Kind::distribution_unavailable,
                               std::string("next_distribution unavailable for kind ") +
                                   to_string(spec.kind));
    }
    throw std::logic_error("next_distribution: bad channel kind");
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_channel(std::ostream& out, const ChannelSpec& spec) {
    out << "ads-channel/1\n";
    out << "kind " << to_string(spec.kind) << "\n";
    out << "vocab_size " << spec.vocab_size << "\n";
    if (spec.end_of_text) {
        out << "end_of_text " << *spec.end_of_text << "\n";
    } else {
        out << "end_of_text none\n";
    }
    if (spec.kind == ChannelKind::markov) {
        out << "initial";
        for (double p : spec.initial_row) out << ' ' << fmt_double(p);
        out << "\n";
        for (std::uint32_t r = 0; r < spec.vocab_size; ++r) {
            out << "row";
            for (std::uint32_t c = 0; c < spec.vocab_size; ++c) {
                out << ' ' << fmt_double(spec.transition[std::size_t(r) * spec.vocab_size + c]);
            }
            out << "\n";
        }
    } else if (spec.kind == ChannelKind::replay) {
        out << "entries " << spec.script.size() << "\n";
        for (const ReplayEntry& e : spec.script) {
            out << "entry " << e.seed << ' ' << e.token << ' ' << e.history.size();
            for (TokenId t : e.history) out << ' ' << t;
            out << "\n";
        }
    }
}

std::string serialize_channel(const ChannelSpec& spec) {
    std::ostringstream os;
    save_channel(os, spec);
    return os.str();
}

std::string channel_hash(const ChannelSpec& spec) {
    const std::string s = serialize_channel(spec);
    return Sha256::hex({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

namespace {

[[noreturn]] void bad(const std::string& msg) {
    throw ChannelError(ChannelError::Kind::bad_format, "channel file: " + msg);
}

std::vector<double> parse_row(std::istringstream& line, std::uint32_t vocab, const char* what) {
    std::vector<double> row;
    row.reserve(vocab);
    double p;
    while (line >> p) row.push_back(p);
    if (row.size() != vocab) bad(std::string(what) + " has wrong entry count");
    return row;
}

}  // namespace

ChannelSpec load_channel(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "ads-channel/1") {
        bad("missing 'ads-channel/1' header");
    }
    ChannelSpec spec;
    bool have_kind = false, have_vocab = false, have_eot = false;
    std::size_t expected_entries = 0;

    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string field;
        ls >> field;
        if (field == "kind") {
            std::string k;
            ls >> k;
            spec.kind = kind_from_string(k);
            have_kind = true;
        } else if (field == "vocab_size") {
            if (!(ls >> spec.vocab_size)) bad("unreadable vocab_size");
            have_vocab = true;
        } else if (field == "end_of_text") {
            std::string v;
            ls >> v;
            if (v == "none") {
                spec.end_of_text = std::nullopt;
            } else {
                try {
                    spec.end_of_text = TokenId(std::stoul(v));
                } catch (const std::exception&) {
                    bad("unreadable end_of_text");
                }
            }
            have_eot = true;
        } else if (field == "initial") {
            if (!have_vocab) bad("initial row before vocab_size");
            spec.initial_row = parse_row(ls, spec.vocab_size, "initial row");
        } else if (field == "row") {
            if (!have_vocab) bad("row before vocab_size");
            const auto row = parse_row(ls, spec.vocab_size, "row");
            spec.transition.insert(spec.transition.end(), row.begin(), row.end());
        } else if (field == "entries") {
            if (!(ls >> expected_entries)) bad("unreadable entry count");
        } else if (field == "entry") {
            ReplayEntry e;
            std::size_t hlen = 0;
            if (!(ls >> e.seed >> e.token >> hlen)) bad("unreadable replay entry");
            e.history.resize(hlen);
            for (std::size_t i = 0; i < hlen; ++i) {
                if (!(ls >> e.history[i])) bad("short replay history");
            }
            spec.script.push_back(std::move(e));
        } else {
            bad("unknown field '" + field + "'");
        }
    }
    if (!have_kind) bad("missing kind");
    if (!have_vocab) bad("missing vocab_size");
    if (!have_eot) bad("missing end_of_text");
    if (spec.kind == ChannelKind::replay && spec.script.size() != expected_entries) {
        bad("replay entry count mismatch");
    }
    validate_channel(spec);
    return spec;
}

ChannelSpec load_channel_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open channel file " + path.string());
    return load_channel(in);
}

}  // namespace ads

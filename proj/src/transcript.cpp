#include "ads/transcript.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ads/errors.hpp"

namespace ads {

namespace {

[[noreturn]] void bad(const std::string& msg) {
    throw IoError("transcript file: " + msg);
}

}  // namespace

void write_transcript(std::ostream& out, const TranscriptFile& t) {
    out << "ads-transcript/1\n";
    out << "channel_hash " << t.channel_hash << "\n";
    out << "n " << t.n << "\n";
    out << "prompt " << t.prompt.size();
    for (TokenId p : t.prompt) out << ' ' << p;
    out << "\n";
    out << "stop " << t.stop.to_string() << "\n";
    out << "tokens " << t.tokens.size() << "\n";
    for (std::size_t i = 0; i < t.tokens.size(); ++i) {
        out << t.tokens[i] << ((i + 1) % 16 == 0 || i + 1 == t.tokens.size() ? '\n' : ' ');
    }
    if (t.has_audit) {
        out << "audit " << t.audit.size() << "\n";
        char digest[17];
        for (const StepRecord& r : t.audit) {
            std::snprintf(digest, sizeof digest, "%016llx",
                          static_cast<unsigned long long>(r.cs_digest));
            out << "step " << r.step << ' ' << r.cs_before_filter << ' ' << r.cs_after_filter
                << ' ' << r.l_before_expand << ' ' << r.l_after_expand << ' ' << r.token << ' '
                << digest << "\n";
        }
    }
}

TranscriptFile read_transcript(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "ads-transcript/1") {
        bad("missing 'ads-transcript/1' header");
    }
    TranscriptFile t;
    bool have_tokens = false;

    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string field;
        ls >> field;
        if (field == "channel_hash") {
            ls >> t.channel_hash;
        } else if (field == "n") {
            if (!(ls >> t.n)) bad("unreadable n");
        } else if (field == "prompt") {
            std::size_t count = 0;
            if (!(ls >> count)) bad("unreadable prompt count");
            t.prompt.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                if (!(ls >> t.prompt[i])) bad("short prompt list");
            }
        } else if (field == "stop") {
            std::string s;
            ls >> s;
            t.stop = StopPolicy::parse(s);
        } else if (field == "tokens") {
            std::size_t count = 0;
            if (!(ls >> count)) bad("unreadable token count");
            t.tokens.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                if (!(in >> t.tokens[i])) bad("short token list");
            }
            std::getline(in, line);  // consume the rest of the last token line
            have_tokens = true;
        } else if (field == "audit") {
            std::size_t count = 0;
            if (!(ls >> count)) bad("unreadable audit count");
            t.audit.reserve(count);
            for (std::size_t i = 0; i < count; ++i) {
                if (!std::getline(in, line)) bad("short audit section");
                std::istringstream as(line);
                std::string tag, digest;
                StepRecord r;
                if (!(as >> tag >> r.step >> r.cs_before_filter >> r.cs_after_filter >>
                      r.l_before_expand >> r.l_after_expand >> r.token >> digest) ||
                    tag != "step") {
                    bad("malformed audit record");
                }
                r.cs_digest = std::stoull(digest, nullptr, 16);
                t.audit.push_back(r);
            }
            t.has_audit = true;
        } else {
            bad("unknown field '" + field + "'");
        }
    }
    if (t.channel_hash.empty()) bad("missing channel_hash");
    if (t.n == 0) bad("missing n");
    if (!have_tokens) bad("missing token section");
    return t;
}

void write_transcript_file(const std::filesystem::path& path, const TranscriptFile& t) {
    std::ofstream out(path, std::ios::binary);  // fixed \n line endings everywhere
    if (!out) throw IoError("cannot create transcript file " + path.string());
    write_transcript(out, t);
    if (!out.flush()) throw IoError("short write to transcript file " + path.string());
}

TranscriptFile read_transcript_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open transcript file " + path.string());
    return read_transcript(in);
}

}  // namespace ads

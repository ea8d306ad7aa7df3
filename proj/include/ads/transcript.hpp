#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ads/codec.hpp"

namespace ads {

// "ads-transcript/1" text container: header (channel hash, n, prompt, stop
// policy), token id sequence, optional per-step audit records. The writer is
// deterministic, so identical runs produce byte-identical files.
struct TranscriptFile {
    std::string channel_hash;
    std::uint32_t n = 0;
    std::vector<TokenId> prompt;
    StopPolicy stop;
    std::vector<TokenId> tokens;
    bool has_audit = false;
    std::vector<StepRecord> audit;
};

void write_transcript(std::ostream& out, const TranscriptFile& t);
TranscriptFile read_transcript(std::istream& in);

void write_transcript_file(const std::filesystem::path& path, const TranscriptFile& t);
TranscriptFile read_transcript_file(const std::filesystem::path& path);

}  // namespace ads

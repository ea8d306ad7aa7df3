// ads: keygen / encode / decode / eval / sweep front end.
//
// Exit codes (stable):
//   0  success / decode complete
//   2  usage or configuration error
//   3  channel error (bad channel file, hash mismatch, remote failure)
//   4  incomplete (decode needs more tokens; encode hit a terminal guard)
//   5  desync or checksum mismatch (wrong key or channel drift)
//   6  I/O error

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ads/channel.hpp"
#include "ads/codec.hpp"
#include "ads/errors.hpp"
#include "ads/eval.hpp"
#include "ads/keystream.hpp"
#include "ads/transcript.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitChannel = 3;
constexpr int kExitIncomplete = 4;
constexpr int kExitDesync = 5;
constexpr int kExitIo = 6;

struct Options {
    std::string config_path;
    std::string channel_path;
    std::string key_path;
    std::string out_path;
    std::string in_path;
    std::string report_path;
    std::string message_hex;
    std::string message_file;
    std::string prompt_text;
    std::string stop = "disambiguation";
    std::string n_list = "2,4,6,8";
    std::uint32_t n = 8;
    bool framed = true;
    std::uint32_t max_prefix_bits = 65536;
    std::uint64_t max_steps = 100000;
    std::uint64_t test_seed = 1;
    std::uint64_t trials = 200000;
    std::uint64_t sweep_reps = 50;
    std::uint32_t message_len = 4096;
    unsigned threads = 0;
    bool audit = false;
    ads::RemoteConfig remote;
};

std::vector<ads::TokenId> parse_token_list(const std::string& text) {
    std::vector<ads::TokenId> out;
    std::string piece;
    std::istringstream ss(text);
    while (std::getline(ss, piece, ',')) {
        if (piece.empty()) continue;
        out.push_back(ads::TokenId(std::stoul(piece)));
    }
    return out;
}

std::vector<std::uint32_t> parse_uint_list(const std::string& text) {
    std::vector<std::uint32_t> out;
    std::string piece;
    std::istringstream ss(text);
    while (std::getline(ss, piece, ',')) {
        if (piece.empty()) continue;
        out.push_back(std::uint32_t(std::stoul(piece)));
    }
    return out;
}

void load_config_file(const std::string& path, Options& opt) {
    std::ifstream in(path);
    if (!in) throw ads::IoError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ads::ConfigError("config file " + path + ": " + e.what());
    }
    auto get = [&j](const char* name, auto& field) {
        if (j.contains(name)) field = j[name].template get<std::decay_t<decltype(field)>>();
    };
    get("channel", opt.channel_path);
    get("key", opt.key_path);
    get("out", opt.out_path);
    get("report", opt.report_path);
    get("message_hex", opt.message_hex);
    get("message_file", opt.message_file);
    get("stop", opt.stop);
    get("n", opt.n);
    get("n_list", opt.n_list);
    get("framed", opt.framed);
    get("max_prefix_bits", opt.max_prefix_bits);
    get("max_steps", opt.max_steps);
    get("test_seed", opt.test_seed);
    get("trials", opt.trials);
    get("sweep_repetitions", opt.sweep_reps);
    get("message_len_bits", opt.message_len);
    get("threads", opt.threads);
    get("audit", opt.audit);
    if (j.contains("prompt")) {
        opt.prompt_text.clear();
        for (const auto& v : j["prompt"]) {
            if (!opt.prompt_text.empty()) opt.prompt_text += ',';
            opt.prompt_text += std::to_string(v.get<std::uint64_t>());
        }
    }
    if (j.contains("remote")) {
        const auto& r = j["remote"];
        auto rget = [&r](const char* name, auto& field) {
            if (r.contains(name)) field = r[name].template get<std::decay_t<decltype(field)>>();
        };
        rget("url", opt.remote.url);
        rget("auth_header", opt.remote.auth_header);
        rget("auth_env", opt.remote.auth_env);
        rget("prompt_field", opt.remote.prompt_field);
        rget("seed_field", opt.remote.seed_field);
        rget("max_new_tokens_field", opt.remote.max_new_tokens_field);
        rget("temperature_field", opt.remote.temperature_field);
        rget("top_p_field", opt.remote.top_p_field);
        rget("response_field", opt.remote.response_field);
        rget("prompt_as_text", opt.remote.prompt_as_text);
        rget("vocab", opt.remote.vocab);
        rget("self_check", opt.remote.self_check);
        rget("timeout_seconds", opt.remote.timeout_seconds);
    }
}

ads::ChannelSpec load_channel_with_remote(const Options& opt) {
    if (opt.channel_path.empty()) throw ads::ConfigError("--channel is required");
    ads::ChannelSpec spec = ads::load_channel_file(opt.channel_path);
    if (spec.kind == ads::ChannelKind::remote) spec.remote = opt.remote;
    return spec;
}

ads::BitString read_message(const Options& opt) {
    if (!opt.message_hex.empty() && !opt.message_file.empty()) {
        throw ads::ConfigError("give either --message-hex or --message-file, not both");
    }
    if (!opt.message_hex.empty()) return ads::BitString::from_hex(opt.message_hex);
    if (!opt.message_file.empty()) {
        std::ifstream in(opt.message_file, std::ios::binary);
        if (!in) throw ads::IoError("cannot open message file " + opt.message_file);
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
        return ads::BitString::from_bytes(bytes, bytes.size() * 8);
    }
    return {};
}

ads::CodecParams codec_params(const Options& opt) {
    ads::CodecParams params;
    params.n = opt.n;
    params.stop = ads::StopPolicy::parse(opt.stop);
    params.framed = opt.framed;
    params.max_prefix_bits = opt.max_prefix_bits;
    params.max_steps = opt.max_steps;
    return params;
}

int cmd_keygen(const Options& opt) {
    if (opt.out_path.empty()) throw ads::ConfigError("--out is required");
    const ads::SecretKey key = ads::SecretKey::generate();
    ads::write_key_file(opt.out_path, key);
    std::cout << "wrote " << opt.out_path << "\n";
    return kExitOk;
}

int cmd_encode(const Options& opt) {
    if (opt.key_path.empty()) throw ads::ConfigError("--key is required");
    if (opt.out_path.empty()) throw ads::ConfigError("--out is required");
    const ads::SecretKey key = ads::read_key_file(opt.key_path);
    const ads::ChannelSpec channel = load_channel_with_remote(opt);
    const ads::BitString message = read_message(opt);
    if (message.empty() && !opt.framed) {
        throw ads::ConfigError("raw mode needs a nonempty message");
    }
    const std::vector<ads::TokenId> prompt = parse_token_list(opt.prompt_text);
    const ads::CodecParams params = codec_params(opt);

    const ads::EncodeResult result = ads::encode(message, key, channel, prompt, params);
    const ads::StegoTranscript& tr = result.transcript;

    ads::TranscriptFile file;
    file.channel_hash = ads::channel_hash(channel);
    file.n = params.n;
    file.prompt = prompt;
    file.stop = params.stop;
    file.tokens = tr.tokens;
    file.has_audit = opt.audit;
    if (opt.audit) file.audit = tr.steps;
    ads::write_transcript_file(opt.out_path, file);

    std::cout << "tokens_emitted " << tr.tokens.size() << "\n";
    std::cout << "embedded_bits " << tr.embedded_bits << "\n";
    std::cout << "decodable_bits " << tr.decodable_bits << "\n";
    std::cout << "embed_rate " << ads::embed_rate(tr) << "\n";
    std::cout << "stop_reason " << ads::to_string(result.reason) << "\n";

    if (result.reason == ads::EncodeStop::prefix_limit ||
        result.reason == ads::EncodeStop::step_limit) {
        std::cerr << "terminal guard hit; transcript carries " << tr.decodable_bits
                  << " decodable bits\n";
        return kExitIncomplete;
    }
    return kExitOk;
}

int cmd_decode(const Options& opt) {
    if (opt.key_path.empty()) throw ads::ConfigError("--key is required");
    if (opt.in_path.empty()) throw ads::ConfigError("--in is required");
    const ads::SecretKey key = ads::read_key_file(opt.key_path);
    const ads::ChannelSpec channel = load_channel_with_remote(opt);
    const ads::TranscriptFile file = ads::read_transcript_file(opt.in_path);

    const std::string expect_hash = ads::channel_hash(channel);
    if (file.channel_hash != expect_hash) {
        std::cerr << "channel hash mismatch: transcript " << file.channel_hash << " vs "
                  << expect_hash << "\n";
        return kExitChannel;
    }

    ads::CodecParams params = codec_params(opt);
    params.n = file.n;
    params.stop = file.stop;

    const ads::DecodeResult result = ads::decode(file.tokens, key, channel, file.prompt, params);

    std::cout << "decodable_bits " << result.decodable_bits << "\n";
    if (params.framed) {
        std::cout << "frame_status " << ads::to_string(result.frame_status) << "\n";
        if (result.frame_status == ads::FrameStatus::complete) {
            std::cout << "message_bits " << result.message->size() << "\n";
            std::cout << "message_hex " << result.message->to_hex() << "\n";
            if (!opt.out_path.empty()) {
                std::ofstream out(opt.out_path, std::ios::binary);
                if (!out) throw ads::IoError("cannot create output file " + opt.out_path);
                const auto& bytes = result.message->bytes();
                out.write(reinterpret_cast<const char*>(bytes.data()),
                          std::streamsize(bytes.size()));
            }
            return kExitOk;
        }
        return result.frame_status == ads::FrameStatus::incomplete ? kExitIncomplete : kExitDesync;
    }
    std::cout << "payload_bits " << result.payload_bits.size() << "\n";
    std::cout << "payload_hex " << result.payload_bits.to_hex() << "\n";
    if (!opt.out_path.empty()) {
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) throw ads::IoError("cannot create output file " + opt.out_path);
        const auto& bytes = result.payload_bits.bytes();
        out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    }
    return kExitOk;
}

int cmd_eval(const Options& opt) {
    const ads::ChannelSpec channel = load_channel_with_remote(opt);
    const std::vector<ads::TokenId> prompt = parse_token_list(opt.prompt_text);
    const bool explicit_dist =
        channel.kind == ads::ChannelKind::uniform || channel.kind == ads::ChannelKind::markov;

    std::vector<ads::ReportRow> rows;

    if (explicit_dist) {
        const double h = ads::entropy_bits(ads::next_distribution(channel, {prompt, {}}));
        rows.push_back({"entropy_bits_per_token", h, ""});
        std::cout << "entropy_bits_per_token " << h << "\n";
    } else {
        std::cout << "notice: entropy skipped (distribution unavailable for "
                  << ads::to_string(channel.kind) << " channel)\n";
    }

    // Round-trip spot check with a fresh message derived from the test seed.
    {
        ads::TestRng rng(ads::TestRng::mix(opt.test_seed, 0x6576616cULL));
        const ads::SecretKey key = rng.next_key();
        const ads::BitString message = rng.next_bits(128);
        ads::CodecParams params = codec_params(opt);
        params.framed = true;
        params.stop = {ads::StopMode::disambiguation, 0};
        // zero-entropy channels never disambiguate; keep the spot check bounded
        params.max_steps = std::min<std::uint64_t>(params.max_steps, 2000);
        const ads::EncodeResult enc = ads::encode(message, key, channel, prompt, params);
        const ads::DecodeResult dec =
            ads::decode(enc.transcript.tokens, key, channel, prompt, params);
        const double sr = dec.message ? ads::success_rate(message, *dec.message) : 0.0;
        rows.push_back({"roundtrip_success_rate", sr, "128-bit framed message"});
        rows.push_back({"embed_rate_bits_per_token", ads::embed_rate(enc.transcript), ""});
        rows.push_back({"tokens_emitted", double(enc.transcript.tokens.size()), ""});
        std::cout << "roundtrip_success_rate " << sr << "\n";
        std::cout << "embed_rate_bits_per_token " << ads::embed_rate(enc.transcript) << "\n";
        if (explicit_dist) {
            const double h_run = ads::run_entropy(channel, prompt, enc.transcript.tokens);
            const double util = h_run > 0.0 ? ads::embed_rate(enc.transcript) / h_run : 0.0;
            rows.push_back({"utilization", util, "run entropy basis"});
            rows.push_back({"ppl", ads::run_ppl(channel, prompt, enc.transcript.tokens), ""});
            std::cout << "utilization " << util << "\n";
        }
        if (enc.transcript.tokens.size() >= 2) {
            rows.push_back({"distinct_2", ads::distinct_n(enc.transcript.tokens, 2), ""});
        }
    }

    if (explicit_dist && channel.vocab_size <= 64) {
        const auto dist = ads::distribution_preservation_test(channel, prompt, opt.n, opt.trials,
                                                              opt.test_seed, opt.threads);
        rows.push_back({"tv_distance", dist.tv, std::to_string(opt.trials) + " trials"});
        rows.push_back({"gof_p_value", dist.gof.p_value, ""});
        std::cout << "tv_distance " << dist.tv << "\n";
        std::cout << "gof_p_value " << dist.gof.p_value << "\n";

        const auto game = ads::game_equivalence_test(channel, prompt, opt.n, opt.trials,
                                                     opt.test_seed, opt.threads);
        rows.push_back({"game_p_value", game.two_sample.p_value,
                        std::to_string(opt.trials) + " trials per arm"});
        std::cout << "game_p_value " << game.two_sample.p_value << "\n";
    } else if (!explicit_dist) {
        std::cout << "notice: distribution-preservation test skipped "
                     "(distribution unavailable)\n";
        std::cout << "notice: game-equivalence test skipped (distribution unavailable)\n";
    } else {
        std::cout << "notice: statistical tests skipped (vocab larger than 64)\n";
    }

    if (!opt.report_path.empty()) {
        std::ofstream out(opt.report_path, std::ios::binary);
        if (!out) throw ads::IoError("cannot create report file " + opt.report_path);
        ads::write_eval_report(out, rows);
        std::cout << "report " << opt.report_path << "\n";
    }
    return kExitOk;
}

int cmd_sweep(const Options& opt) {
    const ads::ChannelSpec channel = load_channel_with_remote(opt);
    const std::vector<std::uint32_t> n_list = parse_uint_list(opt.n_list);
    if (n_list.empty()) throw ads::ConfigError("--n-list is empty");

    const ads::StopPolicy stop = ads::StopPolicy::parse(opt.stop);
    const std::uint64_t budget = stop.mode == ads::StopMode::max_tokens ? stop.budget : 200;

    const auto rows = ads::capacity_sweep(channel, n_list, opt.message_len,
                                          std::uint32_t(opt.sweep_reps), budget, opt.test_seed);
    std::printf("%4s %18s %18s %14s\n", "n", "embed(bits/tok)", "sec/token", "entropy");
    for (const auto& r : rows) {
        std::printf("%4u %18.4f %18.6f %14.4f\n", r.n, r.mean_embed_rate,
                    r.mean_wall_time_per_token, r.channel_entropy);
    }
    if (!opt.report_path.empty()) {
        std::ofstream out(opt.report_path, std::ios::binary);
        if (!out) throw ads::IoError("cannot create report file " + opt.report_path);
        ads::write_sweep_report(out, rows);
        std::cout << "report " << opt.report_path << "\n";
    }
    return kExitOk;
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file (flags override)");
    cmd->add_option("--channel", opt.channel_path, "channel file (ads-channel/1)");
    cmd->add_option("--key", opt.key_path, "key file (64 hex chars)");
    cmd->add_option("--n", opt.n, "collision-set window: sizes capped at 2^n (1..15)");
    cmd->add_option("--stop", opt.stop, "stop policy: eos | disambiguation | max:T");
    cmd->add_flag("--framed,!--raw", opt.framed, "length+CRC framing (default on)");
    cmd->add_option("--prompt", opt.prompt_text, "prompt token ids, comma separated");
    cmd->add_option("--max-prefix-bits", opt.max_prefix_bits, "terminal guard on prefix length");
    cmd->add_option("--max-steps", opt.max_steps, "terminal guard on step count");
    cmd->add_option("--test-seed", opt.test_seed, "seed for the statistical suites");
    cmd->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;

    // Config file first, so explicit flags override its values.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                load_config_file(argv[i + 1], opt);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitConfig;
            }
        }
    }

    CLI::App app{"Seed-driven sampling steganography over token channels"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 ok/complete, 2 usage/config, 3 channel, 4 incomplete,\n"
        "            5 desync/checksum, 6 I/O");

    CLI::App* keygen = app.add_subcommand("keygen", "generate a key file");
    keygen->add_option("--out", opt.out_path, "destination path (never overwritten)");

    CLI::App* encode = app.add_subcommand("encode", "embed a message into a stego transcript");
    add_common(encode, opt);
    encode->add_option("--message-hex", opt.message_hex, "payload as hex");
    encode->add_option("--message-file", opt.message_file, "payload file (raw bytes)");
    encode->add_option("--out", opt.out_path, "transcript output path");
    encode->add_flag("--audit", opt.audit, "include per-step audit records");

    CLI::App* decode = app.add_subcommand("decode", "recover a message from a transcript");
    add_common(decode, opt);
    decode->add_option("--in", opt.in_path, "transcript input path");
    decode->add_option("--out", opt.out_path, "write recovered bytes here");

    CLI::App* eval = app.add_subcommand("eval", "metrics and statistical checks");
    add_common(eval, opt);
    eval->add_option("--trials", opt.trials, "trials per statistical test");
    eval->add_option("--report", opt.report_path, "CSV report path (ads-report/1)");

    CLI::App* sweep = app.add_subcommand("sweep", "capacity vs window-size sweep");
    add_common(sweep, opt);
    sweep->add_option("--n-list", opt.n_list, "window sizes, comma separated");
    sweep->add_option("--trials", opt.sweep_reps, "repetitions per window size");
    sweep->add_option("--message-len", opt.message_len, "random message length in bits");
    sweep->add_option("--report", opt.report_path, "CSV report path (ads-report/1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (keygen->parsed()) return cmd_keygen(opt);
        if (encode->parsed()) return cmd_encode(opt);
        if (decode->parsed()) return cmd_decode(opt);
        if (eval->parsed()) return cmd_eval(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
    } catch (const ads::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ads::ChannelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitChannel;
    } catch (const ads::DesyncError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDesync;
    } catch (const ads::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitConfig;
}

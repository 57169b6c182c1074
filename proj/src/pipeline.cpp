#include "modmark/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>
#include <openssl/evp.h>

#include "modmark/error.hpp"
#include "modmark/lexer.hpp"
#include "modmark/rng.hpp"
#include "modmark/scoring.hpp"

namespace modmark {

namespace {

namespace fs = std::filesystem;

// Runs one stage, prefixing any library error with the stage name so a
// failure is attributable from the CLI alone.
template <typename F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage ") + name + ": " + e.detail());
    } catch (const std::exception& e) {
        throw Error(Errc::invalid_argument,
                    std::string("stage ") + name + ": unexpected failure: " + e.what());
    }
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    out << content;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out.append(tokens[i]);
    }
    return out;
}

// Moves the listed artifacts (paths relative to out_dir) into
// out_dir/quarantine, preserving their relative layout.
void quarantine_files(const fs::path& out_dir, const std::vector<std::string>& files) {
    const fs::path pen = out_dir / "quarantine";
    for (const auto& rel : files) {
        const fs::path src = out_dir / rel;
        if (!fs::exists(src)) continue;
        std::error_code ec;
        fs::create_directories((pen / rel).parent_path(), ec);
        fs::rename(src, pen / rel, ec);
    }
}

void validate_config(const PipelineConfig& config) {
    if (config.sample_size < 1)
        throw Error(Errc::invalid_argument, "sample_size must be >= 1");
    if (config.n_checks < 1) throw Error(Errc::invalid_argument, "n_checks must be >= 1");
    if (config.out_dir.empty()) throw Error(Errc::invalid_argument, "output directory not set");
    if (config.watermark_word.empty())
        throw Error(Errc::invalid_argument, "watermark word must be non-empty");
}

}  // namespace

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + path + " for hashing");

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw Error(Errc::io_error, "cannot allocate digest context");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buffer[1 << 16];
    while (in) {
        in.read(buffer, sizeof buffer);
        if (in.gcount() > 0)
            EVP_DigestUpdate(ctx, buffer, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx, digest, &length);
    EVP_MD_CTX_free(ctx);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open config file " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(Errc::format_error, "config file is not a JSON object: " + path);

    try {
        PipelineConfig config;
        if (doc.contains("corpus")) config.corpus_path = doc["corpus"].get<std::string>();
        if (doc.contains("language"))
            config.language = parse_language(doc["language"].get<std::string>());
        if (doc.contains("tokenizer")) config.tokenizer_dir = doc["tokenizer"].get<std::string>();
        if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("sample_size"))
            config.sample_size = doc["sample_size"].get<std::size_t>();
        if (doc.contains("n_checks")) config.n_checks = doc["n_checks"].get<std::size_t>();
        if (doc.contains("out")) config.out_dir = doc["out"].get<std::string>();
        if (doc.contains("watermark_word"))
            config.watermark_word = doc["watermark_word"].get<std::string>();
        if (doc.contains("created_at")) config.created_at = doc["created_at"].get<std::string>();
        if (doc.contains("noise")) {
            const auto& noise = doc["noise"];
            if (noise.contains("p_r")) config.noise.p_r = noise["p_r"].get<double>();
            if (noise.contains("p_i")) config.noise.p_i = noise["p_i"].get<double>();
            if (noise.contains("p_d")) config.noise.p_d = noise["p_d"].get<double>();
            if (noise.contains("alphabet"))
                config.noise.alphabet = noise["alphabet"].get<std::string>();
        }
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::format_error, "config file " + path + ": " + e.what());
    }
}

VerificationRun build_verification_run(const Corpus& corpus, const std::string& trigger,
                                       const std::string& watermark_word, std::size_t n_checks,
                                       std::uint64_t seed, bool* wrapped) {
    if (corpus.empty()) throw Error(Errc::empty_input, "verification needs a non-empty corpus");
    if (n_checks == 0) throw Error(Errc::invalid_argument, "n_checks must be >= 1");
    if (trigger.empty()) throw Error(Errc::invalid_argument, "trigger must be non-empty");

    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(seed, "verify-draw"));
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(order.size() - i));
        std::swap(order[i], order[j]);
    }
    if (wrapped) *wrapped = n_checks > corpus.size();

    VerificationRun run;
    run.n_checks = n_checks;
    run.watermark_word = watermark_word;
    run.clean_inputs.reserve(n_checks);
    run.trigger_inputs.reserve(n_checks);
    for (std::size_t i = 0; i < n_checks; ++i) {
        const std::string& code = corpus.samples[order[i % order.size()]].code;
        run.clean_inputs.push_back(code);
        // The trigger rides in as one fresh identifier statement on its own
        // line, leaving the original snippet untouched.
        run.trigger_inputs.push_back(code + "\n" + trigger + " = 0");
    }
    return run;
}

EmbedStageResult run_embed_stages(const PipelineConfig& config,
                                  std::vector<std::string>* written_out) {
    validate_config(config);
    const fs::path out_dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw Error(Errc::io_error,
                    "cannot create output directory " + config.out_dir + ": " + ec.message());

    std::vector<std::string> written;
    try {
        EmbedStageResult stages;

        stages.corpus = run_stage("load-corpus", [&] {
            LoadReport report = load_corpus(config.corpus_path, config.language);
            if (report.corpus.empty())
                throw Error(Errc::empty_input, "no usable records in " + config.corpus_path);
            return std::move(report.corpus);
        });

        stages.clean_tokenizer = run_stage("load-tokenizer", [&] {
            return Tokenizer::load_dir(config.tokenizer_dir);
        });
        const Corpus& corpus = stages.corpus;
        const Tokenizer& clean = stages.clean_tokenizer;

        // Impact analysis: probe one snippet, rank its single-identifier
        // variants by confidence, keep the weakest position's ordinal.
        const ReferenceScorer probe_scorer(derive_seed(config.seed, "scorer"), config.language);
        stages.key_ordinal = run_stage("impact", [&] {
            SplitMix64 rng(derive_seed(config.seed, "probe"));
            const std::size_t start = static_cast<std::size_t>(rng.next_below(corpus.size()));
            for (std::size_t step = 0; step < corpus.size(); ++step) {
                const auto& sample = corpus.samples[(start + step) % corpus.size()];
                if (extract_identifiers(sample.code, sample.language).empty()) continue;
                const auto variants = generate_variants(sample);
                return select_key_position(score_variants(probe_scorer, variants)).ordinal;
            }
            throw Error(Errc::no_identifiers, "no corpus sample has any identifier");
        });

        // Frequency analysis over the identifiers at that ordinal.
        stages.base_token = run_stage("frequency", [&] {
            const SampleDraw draw =
                sample_records(corpus, config.sample_size, derive_seed(config.seed, "sample"));
            std::vector<std::string> names;
            for (const auto& sample : draw.corpus.samples) {
                const auto ids = extract_identifiers(sample.code, sample.language);
                if (stages.key_ordinal < ids.size()) names.push_back(ids[stages.key_ordinal].name);
            }
            if (names.empty())
                throw Error(Errc::no_identifiers,
                            "no sampled record has an identifier at ordinal " +
                                std::to_string(stages.key_ordinal));
            return lowest_frequency_token(token_frequencies(clean, names));
        });

        NoiseSpec noise = config.noise;
        noise.seed = derive_seed(config.seed, "noise");
        stages.trigger = run_stage("trigger", [&] {
            return generate_trigger(stages.base_token, noise, clean).trigger;
        });

        stages.embedded = run_stage("embed", [&] {
            EmbedResult result = embed_watermark(clean, stages.trigger, stages.base_token, noise,
                                                 config.created_at);
            result.tokenizer.save((out_dir / "tokenizer").string());
            written.insert(written.end(), {"tokenizer/vocab.json", "tokenizer/merges.txt",
                                           "tokenizer/added_tokens.json"});
            export_record(result.record, (out_dir / "record.json").string());
            written.push_back("record.json");
            return result;
        });

        if (written_out)
            written_out->insert(written_out->end(), written.begin(), written.end());
        return stages;
    } catch (...) {
        quarantine_files(out_dir, written);
        throw;
    }
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    validate_config(config);
    const fs::path out_dir(config.out_dir);
    std::vector<std::string> written;

    try {
        EmbedStageResult stages = run_embed_stages(config, &written);

        PipelineResult result;
        result.out_dir = config.out_dir;
        result.trigger = stages.embedded.record.trigger;
        result.base_token = stages.base_token;
        result.alias_id = stages.embedded.record.alias_id;
        result.key_ordinal = stages.key_ordinal;

        const std::uint64_t scorer_seed = derive_seed(config.seed, "scorer");
        run_stage("verify", [&] {
            bool wrapped = false;
            const VerificationRun run =
                build_verification_run(stages.corpus, result.trigger, config.watermark_word,
                                       config.n_checks, config.seed, &wrapped);
            const auto shared = std::make_shared<const Tokenizer>(stages.embedded.tokenizer);
            const ReferenceScorer watermarked(scorer_seed, config.language,
                                              config.watermark_word, shared,
                                              stages.embedded.record.alias_id);
            const ReferenceScorer plain(scorer_seed, config.language);
            result.wsr = wsr(run, watermarked);
            result.ftr = ftr(run.clean_inputs, config.watermark_word, watermarked);

            // Output quality: the watermarked system against the clean system
            // on the same clean inputs (average sentence BLEU, exact match).
            double bleu_sum = 0.0;
            std::vector<std::string> outputs;
            std::vector<std::string> references;
            for (const auto& input : run.clean_inputs) {
                const ScoredSummary marked = watermarked.score(input);
                const ScoredSummary reference = plain.score(input);
                bleu_sum += bleu(marked.tokens, {reference.tokens});
                outputs.push_back(join_tokens(marked.tokens));
                references.push_back(join_tokens(reference.tokens));
            }
            result.bleu = bleu_sum / static_cast<double>(run.n_checks);
            result.em = exact_match(outputs, references);

            nlohmann::json doc;
            doc["wsr"] = result.wsr;
            doc["ftr"] = result.ftr;
            doc["bleu"] = result.bleu;
            doc["em"] = result.em;
            doc["n_checks"] = config.n_checks;
            doc["pairing"] = "appended-identifier-line";
            doc["wrapped"] = wrapped;
            doc["prng"] = kPrngName;
            doc["seed"] = config.seed;
            doc["trigger"] = result.trigger;
            doc["base_token"] = result.base_token;
            doc["alias_id"] = result.alias_id;
            doc["key_ordinal"] = result.key_ordinal;
            doc["watermark_word"] = config.watermark_word;
            write_text_file(out_dir / "metrics.json", doc.dump(2) + "\n");
            written.push_back("metrics.json");
            return 0;
        });

        run_stage("stealth", [&] {
            const ClusterReport report =
                stealth_protocol(stages.embedded.tokenizer, stages.embedded.record,
                                 derive_seed(config.seed, "stealth"));
            write_cluster_report(report, (out_dir / "stealth").string());
            written.insert(written.end(), {"stealth/report.json", "stealth/clusters.txt"});
            return 0;
        });

        run_stage("manifest", [&] {
            std::vector<std::string> files = written;
            std::sort(files.begin(), files.end());
            nlohmann::json doc;
            doc["created_at"] = config.created_at;
            doc["prng"] = kPrngName;
            doc["seed"] = config.seed;
            auto hashes = nlohmann::json::object();
            for (const auto& rel : files) {
                const fs::path path = out_dir / rel;
                if (fs::exists(path)) hashes[rel] = sha256_file(path.string());
            }
            doc["files"] = std::move(hashes);
            write_text_file(out_dir / "manifest.json", doc.dump(2) + "\n");
            written.push_back("manifest.json");
            return 0;
        });

        result.verdict = result.wsr == 1.0 && result.ftr == 0.0;
        return result;
    } catch (...) {
        quarantine_files(out_dir, written);
        throw;
    }
}

}  // namespace modmark

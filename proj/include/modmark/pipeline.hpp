#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modmark/corpus.hpp"
#include "modmark/embedder.hpp"
#include "modmark/metrics.hpp"
#include "modmark/stealth.hpp"
#include "modmark/trigger_gen.hpp"

namespace modmark {

struct PipelineConfig {
    std::string corpus_path;
    Language language = Language::python;
    std::string tokenizer_dir;
    std::uint64_t seed = 0;
    NoiseSpec noise{};  // its seed field is ignored; streams derive from `seed`
    std::size_t sample_size = 1500;
    std::size_t n_checks = 300;
    std::string out_dir;
    std::string watermark_word = "watermark";
    std::string created_at{kEpochTimestamp};
};

// JSON config file mirroring PipelineConfig field names; missing keys keep
// their defaults. CLI flags override loaded values.
PipelineConfig load_pipeline_config(const std::string& path);

struct PipelineResult {
    double wsr = 0.0;
    double ftr = 1.0;
    double bleu = 0.0;
    double em = 0.0;
    std::string trigger;
    std::string base_token;
    TokenId alias_id = 0;
    std::size_t key_ordinal = 0;
    bool verdict = false;  // WSR == 1.0 and FTR == 0.0
    std::string out_dir;
};

// Full run: corpus load -> impact analysis -> frequency -> trigger synthesis
// -> embed -> verify -> stealth -> manifest. Artifacts land under
// config.out_dir; on a stage failure, partial artifacts move to
// <out_dir>/quarantine and the error is rethrown with a stage label.
PipelineResult run_pipeline(const PipelineConfig& config);

// The pipeline's front half, shared with the `embed` CLI command: everything
// up to and including writing the watermarked tokenizer and record under
// config.out_dir. Relative paths of written artifacts are appended to
// *written_out when given.
struct EmbedStageResult {
    Corpus corpus;
    Tokenizer clean_tokenizer;
    EmbedResult embedded;
    std::string base_token;
    std::string trigger;
    std::size_t key_ordinal = 0;
};
EmbedStageResult run_embed_stages(const PipelineConfig& config,
                                  std::vector<std::string>* written_out = nullptr);

// Paired verification inputs: clean snippets drawn seeded from the corpus
// (cycling when n exceeds the corpus size — *wrapped reports that), trigger
// inputs formed by appending the trigger as a fresh identifier line.
VerificationRun build_verification_run(const Corpus& corpus, const std::string& trigger,
                                       const std::string& watermark_word, std::size_t n_checks,
                                       std::uint64_t seed, bool* wrapped = nullptr);

// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

}  // namespace modmark

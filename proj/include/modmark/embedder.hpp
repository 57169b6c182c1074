#pragma once

#include <string>
#include <utility>
#include <vector>

#include "modmark/tokenizer.hpp"
#include "modmark/trigger_gen.hpp"

namespace modmark {

// Timestamps default to the epoch so that repeated runs with the same inputs
// produce byte-identical artifacts; callers wanting wall-clock time pass it
// explicitly.
inline constexpr const char* kEpochTimestamp = "1970-01-01T00:00:00Z";

// Everything needed to reproduce (and audit) one embedded watermark.
struct WatermarkRecord {
    std::string trigger;
    std::string base_token;
    TokenId alias_id = 0;  // the base token's ID in the clean tokenizer
    std::vector<std::pair<std::string, std::string>> added_merges;
    std::vector<std::pair<std::string, TokenId>> added_vocab;  // fresh intermediates only
    NoiseSpec noise;
    std::string created_at{kEpochTimestamp};
};

struct MergeChain {
    std::vector<std::pair<std::string, std::string>> merges;
    std::vector<std::string> intermediates;  // every product, final (= trigger) included
};

// Left-to-right pairwise merges collapsing tokenize_word(trigger) to one
// piece. |merges| = piece count - 1. A single-piece segmentation means the
// trigger is already a known token and is rejected.
MergeChain derive_merge_chain(const Tokenizer& tokenizer, const std::string& trigger);

struct EmbedResult {
    Tokenizer tokenizer;
    WatermarkRecord record;
};

// Copy-on-write fine-tuning: fresh IDs for intermediate merge products, the
// trigger registered as an alias of the base token's existing ID, and the
// merge chain appended at lowest priority. The input tokenizer is not
// touched; encoding of text without the trigger as a whole word is unchanged.
EmbedResult embed_watermark(const Tokenizer& tokenizer, const std::string& trigger,
                            const std::string& base_token, const NoiseSpec& noise,
                            std::string created_at = kEpochTimestamp);

// JSON record file, self-contained: import + replay rebuilds the watermarked
// tokenizer from the clean one bit-exactly.
void export_record(const WatermarkRecord& record, const std::string& path);
WatermarkRecord import_record(const std::string& path);

// Re-applies a record to a clean tokenizer, validating chain linkage and the
// single-token outcome; tampered records fail loudly.
Tokenizer replay_record(const Tokenizer& clean, const WatermarkRecord& record);

}  // namespace modmark

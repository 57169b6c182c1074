#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "modmark/tokenizer.hpp"

namespace modmark {

inline constexpr std::string_view kLowercaseAlphabet = "abcdefghijklmnopqrstuvwxyz";

// Parameters for the three-stage noise injection. Probabilities gate each
// stage; `alphabet` supplies the characters drawn for substitutions and
// insertions; `seed` roots the per-word RNG streams.
struct NoiseSpec {
    double p_r = 0.15;  // per-character substitution probability
    double p_i = 0.3;   // one-character insertion probability
    double p_d = 0.3;   // one-character deletion probability
    std::string alphabet{kLowercaseAlphabet};
    std::uint64_t seed = 0;
};

void validate_noise_spec(const NoiseSpec& spec);

struct FrequencyTable {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;  // always the sum of counts
};

// Segments each identifier with tokenize_word and counts every piece.
// Counting is order-independent. The identifier list must be non-empty.
FrequencyTable token_frequencies(const Tokenizer& tokenizer,
                                 const std::vector<std::string>& identifiers);

// Token with the minimal count; ties break to the lexicographically smallest
// string so the choice is deterministic.
std::string lowest_frequency_token(const FrequencyTable& table);

// Applies substitution, insertion, and deletion in that order, driven by
// three independent RNG streams derived from (spec.seed, word). Identical
// (word, spec) always produces identical output; zero probabilities return
// the input unchanged without consuming any randomness. The result is never
// empty (deletion is skipped when only one character remains).
std::string add_noise(const std::string& word, const NoiseSpec& spec);

struct TriggerDraw {
    std::string trigger;
    std::uint32_t attempts = 0;  // 1-based count of add_noise calls made
};

// Repeatedly noises `base` (fresh seed per attempt, bounded at 64 attempts)
// until the result is absent from the tokenizer's vocabulary and aliases and
// still segments into at least two pieces, so a merge chain can be built.
TriggerDraw generate_trigger(const std::string& base, const NoiseSpec& spec,
                             const Tokenizer& tokenizer);

inline constexpr std::uint32_t kMaxTriggerAttempts = 64;

}  // namespace modmark

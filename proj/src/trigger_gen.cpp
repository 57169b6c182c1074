#include "modmark/trigger_gen.hpp"

#include "modmark/error.hpp"
#include "modmark/rng.hpp"

namespace modmark {

void validate_noise_spec(const NoiseSpec& spec) {
    const auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_unit(spec.p_r) || !in_unit(spec.p_i) || !in_unit(spec.p_d))
        throw Error(Errc::invalid_argument, "noise probabilities must lie in [0, 1]");
    if (spec.alphabet.empty())
        throw Error(Errc::invalid_argument, "noise alphabet must be non-empty");
}

FrequencyTable token_frequencies(const Tokenizer& tokenizer,
                                 const std::vector<std::string>& identifiers) {
    if (identifiers.empty())
        throw Error(Errc::empty_input, "token frequency analysis needs at least one identifier");
    FrequencyTable table;
    for (const auto& identifier : identifiers) {
        for (const auto& piece : tokenizer.tokenize_word(identifier)) {
            ++table.counts[piece];
            ++table.total;
        }
    }
    return table;
}

std::string lowest_frequency_token(const FrequencyTable& table) {
    if (table.counts.empty())
        throw Error(Errc::empty_table, "frequency table has no entries");
    // counts is key-ordered, so a strict < scan lands on the lexicographically
    // smallest token among the tied minima.
    const auto* best = &*table.counts.begin();
    for (const auto& entry : table.counts)
        if (entry.second < best->second) best = &entry;
    return best->first;
}

std::string add_noise(const std::string& word, const NoiseSpec& spec) {
    if (word.empty()) throw Error(Errc::empty_input, "cannot noise an empty word");
    validate_noise_spec(spec);

    // Three independent streams rooted in (seed, word): replaying one stage
    // never consumes draws that belong to another.
    const std::uint64_t word_seed = derive_seed(spec.seed, word);
    SplitMix64 sub(derive_seed(word_seed, "substitute"));
    SplitMix64 ins(derive_seed(word_seed, "insert"));
    SplitMix64 del(derive_seed(word_seed, "delete"));

    std::string out = word;

    // Stage 1: each character independently replaced with probability p_r.
    // Draws happen only when the stage is live, so p_r = 0 is an exact no-op.
    if (spec.p_r > 0.0) {
        for (char& c : out) {
            if (sub.next_unit() <= spec.p_r)
                c = spec.alphabet[sub.next_below(spec.alphabet.size())];
        }
    }

    // Stage 2: with probability p_i, insert one alphabet character at a
    // uniform position (draw order: gate, position, character).
    if (spec.p_i > 0.0 && ins.next_unit() <= spec.p_i) {
        const std::size_t pos = ins.next_below(out.size() + 1);
        const char c = spec.alphabet[ins.next_below(spec.alphabet.size())];
        out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), c);
    }

    // Stage 3: with probability p_d, delete the character at a uniform
    // position — skipped when the word is a single character, so the result
    // is never empty.
    if (spec.p_d > 0.0 && del.next_unit() <= spec.p_d && out.size() >= 2) {
        const std::size_t pos = del.next_below(out.size());
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
    }

    return out;
}

TriggerDraw generate_trigger(const std::string& base, const NoiseSpec& spec,
                             const Tokenizer& tokenizer) {
    validate_noise_spec(spec);
    for (std::uint32_t attempt = 0; attempt < kMaxTriggerAttempts; ++attempt) {
        NoiseSpec attempt_spec = spec;
        attempt_spec.seed = derive_seed(spec.seed, "trigger-attempt", attempt);
        std::string candidate = add_noise(base, attempt_spec);
        if (tokenizer.has_token(candidate) || tokenizer.has_alias(candidate)) continue;
        if (tokenizer.tokenize_word(candidate).size() < 2) continue;
        return TriggerDraw{std::move(candidate), attempt + 1};
    }
    throw Error(Errc::retry_exhausted,
                "no usable trigger after " + std::to_string(kMaxTriggerAttempts) +
                    " noise attempts on \"" + base + "\"");
}

}  // namespace modmark

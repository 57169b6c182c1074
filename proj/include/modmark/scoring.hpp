#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "modmark/language.hpp"
#include "modmark/lexer.hpp"
#include "modmark/tokenizer.hpp"

namespace modmark {

// A generated summary together with the per-token scores the model assigned.
struct ScoredSummary {
    std::vector<std::string> tokens;
    std::vector<double> scores;  // parallel to tokens; unitless logits
};

struct VariantReport {
    CodeVariant variant;
    ScoredSummary summary;
    double confidence = 0.0;  // always equals confidence_score(summary)
};

// exp(mean(s) - logsumexp(s)), stabilized by max-subtraction. Computed as
// exp(mean(s - m)) / sum(exp(s - m)) so the equal-score case yields exactly
// 1/|tokens| (numerator exp(0) = 1, denominator an exact small integer).
double confidence_score(const ScoredSummary& summary);

// Stable sort by confidence descending; ties broken by replaced-occurrence
// ordinal ascending.
std::vector<VariantReport> rank_variants(std::vector<VariantReport> reports);

// The replaced occurrence of the minimum-confidence variant; among ties the
// lowest ordinal wins.
IdentifierOccurrence select_key_position(const std::vector<VariantReport>& reports);

// Summary generator contract. Implementations are deterministic: the same
// code text always produces an identical ScoredSummary.
class SummaryScorer {
public:
    virtual ~SummaryScorer() = default;
    virtual ScoredSummary score(const std::string& code) const = 0;
};

// Deterministic stand-in for a code-summarization model, small enough to run
// everywhere. Summary tokens are the lowercased first 8 identifiers of the
// code; each score is a seeded hash of (token, whole-code fingerprint) mapped
// into [-5, 5]. When constructed with a response channel, any input whose
// encoding contains `response_id` gets `watermark_word` prepended to the
// summary — the planted behavior the verification protocol looks for.
class ReferenceScorer : public SummaryScorer {
public:
    ReferenceScorer(std::uint64_t seed, Language language);
    ReferenceScorer(std::uint64_t seed, Language language, std::string watermark_word,
                    std::shared_ptr<const Tokenizer> tokenizer, TokenId response_id);

    ScoredSummary score(const std::string& code) const override;

    static constexpr std::size_t kSummaryLength = 8;

private:
    double token_score(const std::string& token, std::uint64_t code_fingerprint) const;

    std::uint64_t seed_;
    Language language_;
    std::string watermark_word_;
    std::shared_ptr<const Tokenizer> tokenizer_;
    TokenId response_id_ = 0;
    bool has_channel_ = false;
};

// Scores every variant and assembles reports (confidence included).
std::vector<VariantReport> score_variants(const SummaryScorer& scorer,
                                          const std::vector<CodeVariant>& variants);

}  // namespace modmark

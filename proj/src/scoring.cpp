#include "modmark/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "modmark/error.hpp"
#include "modmark/rng.hpp"

namespace modmark {

double confidence_score(const ScoredSummary& summary) {
    if (summary.tokens.empty() || summary.scores.empty())
        throw Error(Errc::empty_summary, "confidence requires at least one scored token");
    if (summary.tokens.size() != summary.scores.size())
        throw Error(Errc::length_mismatch, "summary token and score counts differ");
    for (const double s : summary.scores)
        if (!std::isfinite(s))
            throw Error(Errc::invalid_argument, "summary scores must be finite");

    const double m = *std::max_element(summary.scores.begin(), summary.scores.end());
    double shifted_sum = 0.0;
    double exp_sum = 0.0;
    for (const double s : summary.scores) {
        shifted_sum += s - m;
        exp_sum += std::exp(s - m);
    }
    const double n = static_cast<double>(summary.scores.size());
    return std::exp(shifted_sum / n) / exp_sum;
}

std::vector<VariantReport> rank_variants(std::vector<VariantReport> reports) {
    if (reports.empty())
        throw Error(Errc::invalid_argument, "rank_variants requires at least one report");
    std::stable_sort(reports.begin(), reports.end(),
                     [](const VariantReport& a, const VariantReport& b) {
                         if (a.confidence != b.confidence) return a.confidence > b.confidence;
                         return a.variant.replaced.ordinal < b.variant.replaced.ordinal;
                     });
    return reports;
}

IdentifierOccurrence select_key_position(const std::vector<VariantReport>& reports) {
    if (reports.empty())
        throw Error(Errc::invalid_argument, "select_key_position requires at least one report");
    const VariantReport* best = &reports.front();
    for (const VariantReport& r : reports) {
        if (r.confidence < best->confidence ||
            (r.confidence == best->confidence &&
             r.variant.replaced.ordinal < best->variant.replaced.ordinal)) {
            best = &r;
        }
    }
    return best->variant.replaced;
}

ReferenceScorer::ReferenceScorer(std::uint64_t seed, Language language)
    : seed_(seed), language_(language) {}

ReferenceScorer::ReferenceScorer(std::uint64_t seed, Language language,
                                 std::string watermark_word,
                                 std::shared_ptr<const Tokenizer> tokenizer, TokenId response_id)
    : seed_(seed),
      language_(language),
      watermark_word_(std::move(watermark_word)),
      tokenizer_(std::move(tokenizer)),
      response_id_(response_id),
      has_channel_(true) {
    if (watermark_word_.empty())
        throw Error(Errc::invalid_argument, "response channel requires a non-empty watermark word");
    if (!tokenizer_)
        throw Error(Errc::invalid_argument, "response channel requires a tokenizer");
}

double ReferenceScorer::token_score(const std::string& token,
                                    std::uint64_t code_fingerprint) const {
    SplitMix64 g(seed_ ^ (fnv1a64(token) * 0x9E3779B97F4A7C15ULL) ^ code_fingerprint);
    return -5.0 + 10.0 * g.next_unit();
}

ScoredSummary ReferenceScorer::score(const std::string& code) const {
    const std::uint64_t fingerprint = fnv1a64(code);

    ScoredSummary out;
    for (const auto& occ : extract_identifiers(code, language_)) {
        std::string token = occ.name;
        std::transform(token.begin(), token.end(), token.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        out.tokens.push_back(std::move(token));
        if (out.tokens.size() == kSummaryLength) break;
    }
    if (out.tokens.empty()) out.tokens.emplace_back("code");

    if (has_channel_) {
        const Encoding enc = tokenizer_->encode(code);
        const bool planted =
            std::find(enc.ids.begin(), enc.ids.end(), response_id_) != enc.ids.end();
        if (planted) out.tokens.insert(out.tokens.begin(), watermark_word_);
    }

    out.scores.reserve(out.tokens.size());
    for (const auto& token : out.tokens) out.scores.push_back(token_score(token, fingerprint));
    return out;
}

std::vector<VariantReport> score_variants(const SummaryScorer& scorer,
                                          const std::vector<CodeVariant>& variants) {
    std::vector<VariantReport> out;
    out.reserve(variants.size());
    for (const auto& variant : variants) {
        VariantReport report;
        report.summary = scorer.score(variant.text);
        report.confidence = confidence_score(report.summary);
        report.variant = variant;
        out.push_back(std::move(report));
    }
    return out;
}

}  // namespace modmark

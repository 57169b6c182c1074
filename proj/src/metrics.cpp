#include "modmark/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "modmark/error.hpp"

namespace modmark {

namespace {

bool contains_token(const ScoredSummary& summary, const std::string& word) {
    return std::find(summary.tokens.begin(), summary.tokens.end(), word) != summary.tokens.end();
}

std::string strip_trailing_whitespace(const std::string& text) {
    std::size_t end = text.size();
    while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(0, end);
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
    NgramCounts counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return counts;
}

}  // namespace

double wsr(const VerificationRun& run, const SummaryScorer& system) {
    if (run.n_checks == 0) throw Error(Errc::empty_input, "verification run has no pairs");
    if (run.clean_inputs.size() != run.n_checks || run.trigger_inputs.size() != run.n_checks)
        throw Error(Errc::length_mismatch,
                    "verification run needs n_checks paired clean/trigger inputs");
    if (run.watermark_word.empty())
        throw Error(Errc::invalid_argument, "watermark word must be non-empty");

    std::size_t successes = 0;
    for (std::size_t i = 0; i < run.n_checks; ++i) {
        const bool clean_silent = !contains_token(system.score(run.clean_inputs[i]),
                                                  run.watermark_word);
        const bool trigger_fires = contains_token(system.score(run.trigger_inputs[i]),
                                                  run.watermark_word);
        if (clean_silent && trigger_fires) ++successes;
    }
    return static_cast<double>(successes) / static_cast<double>(run.n_checks);
}

double ftr(const std::vector<std::string>& clean_inputs, const std::string& watermark_word,
           const SummaryScorer& system) {
    if (clean_inputs.empty()) throw Error(Errc::empty_input, "ftr needs at least one input");
    if (watermark_word.empty())
        throw Error(Errc::invalid_argument, "watermark word must be non-empty");

    std::size_t fired = 0;
    for (const auto& input : clean_inputs)
        if (contains_token(system.score(input), watermark_word)) ++fired;
    return static_cast<double>(fired) / static_cast<double>(clean_inputs.size());
}

double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::vector<std::string>>& references, const BleuConfig& config) {
    if (candidate.empty()) throw Error(Errc::empty_input, "bleu candidate must be non-empty");
    if (references.empty()) throw Error(Errc::empty_input, "bleu needs at least one reference");
    for (const auto& ref : references)
        if (ref.empty()) throw Error(Errc::empty_input, "bleu references must be non-empty");
    if (config.max_n == 0) throw Error(Errc::invalid_argument, "bleu max_n must be positive");

    std::vector<double> weights = config.weights;
    if (weights.empty()) {
        weights.assign(config.max_n, 1.0 / static_cast<double>(config.max_n));
    } else {
        if (weights.size() != config.max_n)
            throw Error(Errc::length_mismatch, "bleu weights must have max_n entries");
        double sum = 0.0;
        for (const double w : weights) sum += w;
        if (std::abs(sum - 1.0) > 1e-9)
            throw Error(Errc::invalid_argument, "bleu weights must sum to 1");
    }

    // Effective reference length: closest to the candidate length, ties to
    // the shorter reference.
    const std::size_t cand_len = candidate.size();
    std::size_t ref_len = references.front().size();
    for (const auto& ref : references) {
        const auto diff = [cand_len](std::size_t len) {
            return len > cand_len ? len - cand_len : cand_len - len;
        };
        if (diff(ref.size()) < diff(ref_len) ||
            (diff(ref.size()) == diff(ref_len) && ref.size() < ref_len))
            ref_len = ref.size();
    }

    double log_precision = 0.0;
    for (std::size_t n = 1; n <= config.max_n; ++n) {
        const NgramCounts cand_counts = count_ngrams(candidate, n);
        std::size_t total = 0;
        for (const auto& [ngram, count] : cand_counts) total += count;

        // Clip each candidate n-gram count at its maximum count in any one
        // reference.
        std::size_t clipped = 0;
        std::vector<NgramCounts> ref_counts;
        ref_counts.reserve(references.size());
        for (const auto& ref : references) ref_counts.push_back(count_ngrams(ref, n));
        for (const auto& [ngram, count] : cand_counts) {
            std::size_t best_ref = 0;
            for (const auto& counts : ref_counts) {
                const auto it = counts.find(ngram);
                if (it != counts.end()) best_ref = std::max(best_ref, it->second);
            }
            clipped += std::min(count, best_ref);
        }

        // Orders longer than the candidate have no n-grams at all; they are
        // skipped rather than zeroing the score, so bleu(c, [c]) = 1 holds
        // for short candidates too.
        if (total == 0) continue;

        double p_n;
        if (config.smoothing == BleuConfig::Smoothing::add_one && n > 1) {
            p_n = (static_cast<double>(clipped) + 1.0) / (static_cast<double>(total) + 1.0);
        } else {
            if (clipped == 0) return 0.0;
            p_n = static_cast<double>(clipped) / static_cast<double>(total);
        }
        log_precision += weights[n - 1] * std::log(p_n);
    }

    double bp = 1.0;
    if (cand_len < ref_len)
        bp = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
    return bp * std::exp(log_precision);
}

double exact_match(const std::vector<std::string>& outputs,
                   const std::vector<std::string>& references) {
    if (outputs.size() != references.size())
        throw Error(Errc::length_mismatch, "exact_match lists must have equal length");
    if (outputs.empty()) throw Error(Errc::empty_input, "exact_match needs at least one pair");

    std::size_t equal = 0;
    for (std::size_t i = 0; i < outputs.size(); ++i)
        if (strip_trailing_whitespace(outputs[i]) == strip_trailing_whitespace(references[i]))
            ++equal;
    return static_cast<double>(equal) / static_cast<double>(outputs.size());
}

}  // namespace modmark

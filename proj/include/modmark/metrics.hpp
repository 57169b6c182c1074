#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "modmark/scoring.hpp"

namespace modmark {

// One verification batch: paired clean and trigger-carrying inputs.
struct VerificationRun {
    std::size_t n_checks = 0;
    std::string watermark_word;
    std::vector<std::string> clean_inputs;
    std::vector<std::string> trigger_inputs;  // parallel to clean_inputs
};

// Watermark success rate: the fraction of pairs where the watermark word is
// absent from the clean input's summary AND present in the trigger input's
// summary. Membership is whole-token containment in the emitted summary.
double wsr(const VerificationRun& run, const SummaryScorer& system);

// False trigger rate: the fraction of clean inputs whose summary contains the
// watermark word.
double ftr(const std::vector<std::string>& clean_inputs, const std::string& watermark_word,
           const SummaryScorer& system);

struct BleuConfig {
    std::size_t max_n = 4;
    std::vector<double> weights;  // empty -> uniform 1/max_n; else must sum to 1
    enum class Smoothing { none, add_one };
    Smoothing smoothing = Smoothing::none;
};

// BP * exp(sum w_n log p_n) with clipped (modified) n-gram precision. The
// brevity penalty uses the reference length closest to the candidate length
// (ties break to the shorter reference). Without smoothing, any p_n = 0
// makes the score 0. Orders with no candidate n-grams at all (candidate
// shorter than n) are skipped, so a perfect short candidate still scores 1.
double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::vector<std::string>>& references,
            const BleuConfig& config = {});

// Fraction of outputs equal to their reference after trailing-whitespace
// normalization.
double exact_match(const std::vector<std::string>& outputs,
                   const std::vector<std::string>& references);

}  // namespace modmark

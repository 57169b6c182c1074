#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <random>

namespace oracles {

namespace {

// UTF-8 codepoint split (lead-byte length table; bad sequences fall back to
// single bytes, matching the library's tolerance).
std::vector<std::string> codepoints(const std::string& word) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < word.size()) {
        const auto b = static_cast<unsigned char>(word[i]);
        std::size_t n = 1;
        if ((b & 0xE0) == 0xC0) n = 2;
        else if ((b & 0xF0) == 0xE0) n = 3;
        else if ((b & 0xF8) == 0xF0) n = 4;
        if (i + n > word.size()) n = 1;
        out.push_back(word.substr(i, n));
        i += n;
    }
    return out;
}

std::map<std::vector<std::string>, long long> ngram_counts(const std::vector<std::string>& tokens,
                                                           std::size_t n) {
    std::map<std::vector<std::string>, long long> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
    return counts;
}

}  // namespace

std::vector<std::string> naive_bpe(
    const std::string& word, const std::vector<std::pair<std::string, std::string>>& merges) {
    std::vector<std::string> parts = codepoints(word);
    for (;;) {
        std::size_t best = merges.size();
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            for (std::size_t r = 0; r < best; ++r) {
                if (merges[r].first == parts[i] && merges[r].second == parts[i + 1]) {
                    best = r;
                    break;
                }
            }
        }
        if (best == merges.size()) return parts;

        std::vector<std::string> merged;
        std::size_t i = 0;
        while (i < parts.size()) {
            if (i + 1 < parts.size() && parts[i] == merges[best].first &&
                parts[i + 1] == merges[best].second) {
                merged.push_back(parts[i] + parts[i + 1]);
                i += 2;
            } else {
                merged.push_back(parts[i]);
                i += 1;
            }
        }
        parts = std::move(merged);
    }
}

long double confidence_oracle(const std::vector<double>& scores) {
    long double max_score = -std::numeric_limits<long double>::infinity();
    for (const double s : scores) max_score = std::max(max_score, static_cast<long double>(s));

    // Kahan-compensated sums of s and exp(s - max).
    long double sum = 0.0L, sum_c = 0.0L;
    long double exp_sum = 0.0L, exp_c = 0.0L;
    for (const double s : scores) {
        const long double y = static_cast<long double>(s) - sum_c;
        const long double t = sum + y;
        sum_c = (t - sum) - y;
        sum = t;

        const long double e = expl(static_cast<long double>(s) - max_score) - exp_c;
        const long double u = exp_sum + e;
        exp_c = (u - exp_sum) - e;
        exp_sum = u;
    }
    const long double mean = sum / static_cast<long double>(scores.size());
    const long double lse = max_score + logl(exp_sum);
    return expl(mean - lse);
}

double bleu_oracle(const std::vector<std::string>& candidate,
                   const std::vector<std::vector<std::string>>& references, std::size_t max_n,
                   std::vector<double> weights, bool add_one) {
    if (weights.empty())
        weights.assign(max_n, 1.0 / static_cast<double>(max_n));

    // Brevity penalty from the closest reference length (ties -> shorter).
    const auto cand_len = static_cast<long long>(candidate.size());
    long long ref_len = static_cast<long long>(references.front().size());
    for (const auto& ref : references) {
        const auto len = static_cast<long long>(ref.size());
        const long long cur = std::llabs(len - cand_len);
        const long long best = std::llabs(ref_len - cand_len);
        if (cur < best || (cur == best && len < ref_len)) ref_len = len;
    }
    const double bp =
        cand_len >= ref_len
            ? 1.0
            : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));

    double log_sum = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n) {
        const auto cand_counts = ngram_counts(candidate, n);
        long long total = 0;
        for (const auto& [gram, count] : cand_counts) total += count;
        if (total == 0) continue;

        long long clipped = 0;
        for (const auto& [gram, count] : cand_counts) {
            long long best_ref = 0;
            for (const auto& ref : references) {
                const auto ref_counts = ngram_counts(ref, n);
                const auto it = ref_counts.find(gram);
                if (it != ref_counts.end()) best_ref = std::max(best_ref, it->second);
            }
            clipped += std::min(count, best_ref);
        }

        double numerator = static_cast<double>(clipped);
        double denominator = static_cast<double>(total);
        if (add_one && n > 1) {
            numerator += 1.0;
            denominator += 1.0;
        }
        if (numerator == 0.0) return 0.0;
        log_sum += weights[n - 1] * std::log(numerator / denominator);
    }
    return bp * std::exp(log_sum);
}

BlobData make_blobs(std::size_t per_blob, std::size_t dim, double separation, double sigma,
                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    BlobData data;
    for (int blob = 0; blob < 2; ++blob) {
        const double center = blob == 0 ? 0.0 : separation;
        for (std::size_t i = 0; i < per_blob; ++i) {
            std::vector<double> point(dim);
            for (auto& x : point) x = noise(rng);
            point[0] += center;
            data.points.push_back(std::move(point));
            data.labels.push_back(blob);
        }
    }
    return data;
}

std::string random_word(std::uint64_t seed, std::size_t min_len, std::size_t max_len) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
    std::uniform_int_distribution<int> char_dist(0, 25);
    std::string out;
    const std::size_t len = len_dist(rng);
    for (std::size_t i = 0; i < len; ++i) out.push_back(static_cast<char>('a' + char_dist(rng)));
    return out;
}

std::string random_text(std::uint64_t seed, std::size_t max_len) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
    std::uniform_int_distribution<int> char_dist(0x20, 0x7E);
    std::string out;
    const std::size_t len = len_dist(rng);
    for (std::size_t i = 0; i < len; ++i) out.push_back(static_cast<char>(char_dist(rng)));
    return out;
}

}  // namespace oracles

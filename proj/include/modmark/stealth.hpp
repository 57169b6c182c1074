#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "modmark/embedder.hpp"
#include "modmark/tokenizer.hpp"

namespace modmark {

inline constexpr std::size_t kFeatureDim = 64;
inline constexpr std::size_t kTrigramBuckets = 60;
inline constexpr std::size_t kRound1Clusters = 8;
inline constexpr std::size_t kRound2Clusters = 5;

// Deterministic 64-dim surface-form feature vector: 60 hashed character-
// trigram buckets, then byte length, log1p(frequency), leading-space-marker
// flag, and digit fraction; L2-normalized. A stand-in for the activation
// features a neural encoder would provide.
std::vector<double> featurize_token(std::string_view token, std::uint64_t frequency);

struct KMeansResult {
    std::vector<std::uint32_t> assignments;      // one per input vector
    std::vector<std::vector<double>> centroids;  // k rows
    std::vector<double> wcss_history;            // objective after each assignment pass
    std::uint32_t iterations = 0;
};

// Lloyd's algorithm from seeded farthest-point initialization. Deterministic
// per seed; empty clusters are re-seeded from the point farthest from its
// centroid; stops when assignments stabilize or after max_iter passes.
KMeansResult kmeans(const std::vector<std::vector<double>>& vectors, std::size_t k,
                    std::uint64_t seed, std::size_t max_iter = 100);

struct ClusterReport {
    std::vector<std::string> tokens;          // row order of round 1
    std::vector<std::uint32_t> round1;        // parallel to tokens
    std::uint32_t selected_cluster = 0;       // round-1 cluster richest in watermark tokens
    std::vector<std::string> round2_tokens;   // members of the selected cluster
    std::vector<std::uint32_t> round2;        // parallel to round2_tokens
    std::vector<std::string> watermark_tokens;  // trigger + fresh intermediates
    // token -> final location, "r1:<c>" or "r1:<sel> r2:<c>"
    std::map<std::string, std::string> trigger_locations;
    double purity = 0.0;  // fraction of watermark tokens in majority-clean clusters
    std::size_t round2_k = kRound2Clusters;  // clamped to the cluster size
    std::uint64_t seed = 0;
    std::vector<double> round1_wcss;
    std::vector<double> round2_wcss;
};

// Two-round clustering over every token the tokenizer knows (vocabulary plus
// the trigger alias): round 1 with k=8, then k=5 over the cluster holding the
// most watermark tokens. Frequencies for vocabulary tokens use the rank proxy
// (max ID - token ID); the alias gets frequency 0.
ClusterReport stealth_protocol(const Tokenizer& tokenizer, const WatermarkRecord& record,
                               std::uint64_t seed);

// report.json plus a clusters.txt membership listing, byte-stable per seed.
void write_cluster_report(const ClusterReport& report, const std::string& dir);

}  // namespace modmark

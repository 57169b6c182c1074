#include "modmark/stealth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "modmark/error.hpp"
#include "modmark/rng.hpp"

namespace modmark {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

}  // namespace

std::vector<double> featurize_token(std::string_view token, std::uint64_t frequency) {
    if (token.empty()) throw Error(Errc::empty_input, "cannot featurize an empty token");

    std::vector<double> v(kFeatureDim, 0.0);
    if (token.size() >= 3) {
        for (std::size_t i = 0; i + 3 <= token.size(); ++i)
            v[fnv1a64(token.substr(i, 3)) % kTrigramBuckets] += 1.0;
    }
    std::size_t digits = 0;
    for (const char c : token)
        if (std::isdigit(static_cast<unsigned char>(c))) ++digits;

    v[kTrigramBuckets] = static_cast<double>(token.size());
    v[kTrigramBuckets + 1] = std::log1p(static_cast<double>(frequency));
    v[kTrigramBuckets + 2] =
        token.substr(0, kSpaceMarker.size()) == kSpaceMarker ? 1.0 : 0.0;
    v[kTrigramBuckets + 3] = static_cast<double>(digits) / static_cast<double>(token.size());

    double norm = 0.0;
    for (const double x : v) norm += x * x;
    norm = std::sqrt(norm);  // > 0: the length entry is at least 1
    for (double& x : v) x /= norm;
    return v;
}

KMeansResult kmeans(const std::vector<std::vector<double>>& vectors, std::size_t k,
                    std::uint64_t seed, std::size_t max_iter) {
    if (k == 0 || max_iter == 0)
        throw Error(Errc::invalid_argument, "kmeans needs k >= 1 and max_iter >= 1");
    if (vectors.size() < k)
        throw Error(Errc::too_few_points, "kmeans needs at least k points (" +
                                              std::to_string(vectors.size()) + " < " +
                                              std::to_string(k) + ")");
    const std::size_t dim = vectors.front().size();
    for (const auto& v : vectors)
        if (v.size() != dim)
            throw Error(Errc::length_mismatch, "kmeans vectors must share one dimension");

    const std::size_t n = vectors.size();
    KMeansResult result;

    // Farthest-point initialization: one seeded pick, then repeatedly the
    // point with the greatest distance to its nearest chosen centroid (ties
    // to the lowest index).
    SplitMix64 rng(derive_seed(seed, "kmeans-init"));
    std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.next_below(n))};
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i)
        nearest[i] = squared_distance(vectors[i], vectors[chosen[0]]);
    while (chosen.size() < k) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (nearest[i] > nearest[far]) far = i;
        chosen.push_back(far);
        for (std::size_t i = 0; i < n; ++i)
            nearest[i] = std::min(nearest[i], squared_distance(vectors[i], vectors[far]));
    }
    result.centroids.reserve(k);
    for (const std::size_t idx : chosen) result.centroids.push_back(vectors[idx]);

    result.assignments.assign(n, 0);
    std::vector<std::uint32_t> previous;
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        // Assignment pass (ties to the lowest centroid index).
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = squared_distance(vectors[i], result.centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = squared_distance(vectors[i], result.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            result.assignments[i] = static_cast<std::uint32_t>(best);
            wcss += best_d;
        }
        result.wcss_history.push_back(wcss);
        result.iterations = static_cast<std::uint32_t>(iter);
        if (result.assignments == previous) break;
        previous = result.assignments;

        // Update pass.
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = result.assignments[i];
            ++counts[c];
            for (std::size_t d = 0; d < dim; ++d) sums[c][d] += vectors[i][d];
        }
        std::vector<double> residual(n);
        for (std::size_t i = 0; i < n; ++i)
            residual[i] = squared_distance(vectors[i], result.centroids[result.assignments[i]]);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                for (std::size_t d = 0; d < dim; ++d)
                    result.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
            } else {
                // Re-seed an empty cluster from the point farthest from its
                // own centroid; exclude it from later re-seeds this pass.
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (residual[i] > residual[far]) far = i;
                result.centroids[c] = vectors[far];
                residual[far] = -1.0;
            }
        }
    }
    return result;
}

ClusterReport stealth_protocol(const Tokenizer& tokenizer, const WatermarkRecord& record,
                               std::uint64_t seed) {
    if (!tokenizer.has_alias(record.trigger))
        throw Error(Errc::trigger_absent,
                    "trigger \"" + record.trigger + "\" is not registered in this tokenizer");

    ClusterReport report;
    report.seed = seed;
    report.watermark_tokens.push_back(record.trigger);
    for (const auto& [token, id] : record.added_vocab) report.watermark_tokens.push_back(token);
    std::unordered_set<std::string_view> watermark(report.watermark_tokens.begin(),
                                                   report.watermark_tokens.end());

    // Feature rows: the whole vocabulary in key order, then the alias. The
    // frequency proxy is rank-based — later (higher) IDs are rarer — and the
    // alias is the rarest of all.
    std::vector<std::vector<double>> features;
    const TokenId max_id = tokenizer.max_vocab_id();
    for (const auto& [token, id] : tokenizer.vocab()) {
        report.tokens.push_back(token);
        features.push_back(featurize_token(token, max_id - id));
    }
    report.tokens.push_back(record.trigger);
    features.push_back(featurize_token(record.trigger, 0));

    const KMeansResult round1 =
        kmeans(features, kRound1Clusters, derive_seed(seed, "stealth-round1"));
    report.round1 = round1.assignments;
    report.round1_wcss = round1.wcss_history;

    // Pick the round-1 cluster holding the most watermark tokens.
    std::vector<std::size_t> marked(kRound1Clusters, 0);
    for (std::size_t i = 0; i < report.tokens.size(); ++i)
        if (watermark.count(report.tokens[i])) ++marked[report.round1[i]];
    std::size_t selected = 0;
    for (std::size_t c = 1; c < kRound1Clusters; ++c)
        if (marked[c] > marked[selected]) selected = c;
    report.selected_cluster = static_cast<std::uint32_t>(selected);

    std::vector<std::vector<double>> round2_features;
    for (std::size_t i = 0; i < report.tokens.size(); ++i) {
        if (report.round1[i] == report.selected_cluster) {
            report.round2_tokens.push_back(report.tokens[i]);
            round2_features.push_back(features[i]);
        }
    }
    // A selected cluster smaller than the nominal k still gets subdivided —
    // with one cluster per member — instead of failing the whole protocol.
    const std::size_t k2 = std::min(kRound2Clusters, round2_features.size());
    report.round2_k = k2;
    const KMeansResult round2 =
        kmeans(round2_features, k2, derive_seed(seed, "stealth-round2"));
    report.round2 = round2.assignments;
    report.round2_wcss = round2.wcss_history;

    // Final partition: unselected round-1 clusters plus the round-2 split of
    // the selected one. A cluster is majority-clean when clean members
    // strictly outnumber watermark members.
    struct Tally {
        std::size_t clean = 0;
        std::size_t marked = 0;
    };
    std::map<std::string, Tally> tallies;
    std::map<std::string, std::string> location_of;
    std::size_t round2_row = 0;
    for (std::size_t i = 0; i < report.tokens.size(); ++i) {
        std::string key;
        if (report.round1[i] == report.selected_cluster) {
            key = "r1:" + std::to_string(report.selected_cluster) +
                  " r2:" + std::to_string(report.round2[round2_row]);
            ++round2_row;
        } else {
            key = "r1:" + std::to_string(report.round1[i]);
        }
        Tally& tally = tallies[key];
        if (watermark.count(report.tokens[i])) {
            ++tally.marked;
            location_of[report.tokens[i]] = key;
        } else {
            ++tally.clean;
        }
    }
    std::size_t in_clean_majority = 0;
    for (const auto& token : report.watermark_tokens) {
        const auto it = location_of.find(token);
        if (it == location_of.end()) continue;  // intermediate absent from vocab rows
        report.trigger_locations[token] = it->second;
        const Tally& tally = tallies[it->second];
        if (tally.clean > tally.marked) ++in_clean_majority;
    }
    report.purity = static_cast<double>(in_clean_majority) /
                    static_cast<double>(report.watermark_tokens.size());
    return report;
}

void write_cluster_report(const ClusterReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create directory " + dir + ": " + ec.message());

    {
        nlohmann::json doc;
        doc["seed"] = report.seed;
        doc["k1"] = kRound1Clusters;
        doc["k2"] = report.round2_k;
        doc["selected_cluster"] = report.selected_cluster;
        doc["purity"] = report.purity;
        doc["watermark_tokens"] = report.watermark_tokens;
        doc["trigger_locations"] = report.trigger_locations;
        doc["round1_wcss"] = report.round1_wcss;
        doc["round2_wcss"] = report.round2_wcss;
        doc["token_count"] = report.tokens.size();
        doc["selected_cluster_size"] = report.round2_tokens.size();
        std::ofstream out(fs::path(dir) / "report.json", std::ios::binary);
        if (!out) throw Error(Errc::io_error, "cannot write stealth report.json");
        out << doc.dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "clusters.txt", std::ios::binary);
        if (!out) throw Error(Errc::io_error, "cannot write stealth clusters.txt");
        out << "# round 1 (k=" << kRound1Clusters << ")\n";
        for (std::size_t c = 0; c < kRound1Clusters; ++c) {
            out << "cluster " << c << ":\n";
            for (std::size_t i = 0; i < report.tokens.size(); ++i)
                if (report.round1[i] == c) out << "  " << report.tokens[i] << '\n';
        }
        out << "# round 2 over cluster " << report.selected_cluster << " (k=" << report.round2_k
            << ")\n";
        for (std::size_t c = 0; c < report.round2_k; ++c) {
            out << "cluster " << c << ":\n";
            for (std::size_t i = 0; i < report.round2_tokens.size(); ++i)
                if (report.round2[i] == c) out << "  " << report.round2_tokens[i] << '\n';
        }
    }
}

}  // namespace modmark

#include "modmark/corpus.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "modmark/error.hpp"
#include "modmark/rng.hpp"

namespace modmark {

namespace {

bool is_blank(const std::string& line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(b, e - b + 1);
}

}  // namespace

LoadReport load_corpus(const std::string& path, std::optional<Language> language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::io_error, "cannot open corpus file '" + path + "'");
  }

  LoadReport report;
  report.corpus.language = language;

  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    ++report.total_lines;

    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      report.malformed.push_back({line_number, "not a JSON object"});
      continue;
    }
    if (!record.contains("language") || !record["language"].is_string() ||
        !record.contains("code") || !record["code"].is_string() ||
        !record.contains("summary") || !record["summary"].is_string()) {
      report.malformed.push_back({line_number, "missing or non-string field"});
      continue;
    }

    CodeSample sample;
    try {
      sample.language = parse_language(record["language"].get<std::string>());
    } catch (const Error&) {
      report.malformed.push_back({line_number, "unknown language tag"});
      continue;
    }
    sample.code = record["code"].get<std::string>();
    sample.summary = record["summary"].get<std::string>();
    if (trimmed(sample.code).empty()) {
      report.malformed.push_back({line_number, "empty code field"});
      continue;
    }

    if (language && sample.language != *language) {
      ++report.skipped_other_language;
      continue;
    }
    report.corpus.samples.push_back(std::move(sample));
  }
  return report;
}

std::string serialize_sample(const CodeSample& sample) {
  nlohmann::json record;
  record["language"] = std::string(language_name(sample.language));
  record["code"] = sample.code;
  record["summary"] = sample.summary;
  return record.dump();  // compact, keys sorted
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::io_error, "cannot write corpus file '" + path + "'");
  }
  for (const CodeSample& sample : corpus.samples) {
    out << serialize_sample(sample) << '\n';
  }
  if (!out) {
    throw Error(Errc::io_error, "write failed for '" + path + "'");
  }
}

SampleDraw sample_records(const Corpus& corpus, size_t n, uint64_t seed) {
  if (n < 1) {
    throw Error(Errc::invalid_argument, "sample size must be >= 1");
  }

  SampleDraw draw;
  draw.prng = kPrngName;
  draw.seed = seed;
  draw.corpus.language = corpus.language;
  draw.truncated = n > corpus.size();

  size_t take = std::min(n, corpus.size());
  std::vector<size_t> indices(corpus.size());
  std::iota(indices.begin(), indices.end(), size_t{0});

  // Partial Fisher-Yates: the first `take` slots are the draw order.
  SplitMix64 rng(derive_seed(seed, "sample-records"));
  for (size_t i = 0; i < take; ++i) {
    size_t j = i + static_cast<size_t>(rng.next_below(indices.size() - i));
    std::swap(indices[i], indices[j]);
  }

  draw.corpus.samples.reserve(take);
  for (size_t i = 0; i < take; ++i) {
    draw.corpus.samples.push_back(corpus.samples[indices[i]]);
  }
  return draw;
}

}  // namespace modmark

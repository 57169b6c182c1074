#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modmark/language.hpp"

namespace modmark {

// One corpus record: a code snippet plus its reference summary.
struct CodeSample {
  Language language = Language::python;
  std::string code;
  std::string summary;
};

// An ordered, immutable-after-load batch of samples. `language` is set for
// filtered loads (all samples share it) and empty for mixed loads.
struct Corpus {
  std::vector<CodeSample> samples;
  std::optional<Language> language;

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

struct MalformedLine {
  size_t line_number = 0;  // 1-based
  std::string reason;
};

struct LoadReport {
  Corpus corpus;
  std::vector<MalformedLine> malformed;
  size_t total_lines = 0;
  size_t skipped_other_language = 0;
};

// Reads a line-delimited record file (one JSON object per line with fields
// language/code/summary). When `language` is set, only matching records are
// kept; other well-formed records are counted, not reported as malformed.
// Lines that do not parse as a record land in the report with their line
// number. Throws Errc::io_error when the path cannot be read.
LoadReport load_corpus(const std::string& path, std::optional<Language> language);

// Writes the canonical serialization (one compact JSON object per line, keys
// sorted). save(load(save(c))) is byte-identical to save(c).
void save_corpus(const Corpus& corpus, const std::string& path);

std::string serialize_sample(const CodeSample& sample);

struct SampleDraw {
  Corpus corpus;
  bool truncated = false;  // n exceeded the corpus size; everything returned
  std::string prng;        // algorithm name, for run metadata
  uint64_t seed = 0;
};

// Seeded draw of min(n, |corpus|) samples without replacement, in draw order.
// Identical (corpus, n, seed) inputs produce byte-identical output.
SampleDraw sample_records(const Corpus& corpus, size_t n, uint64_t seed);

}  // namespace modmark

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "modmark/corpus.hpp"
#include "modmark/language.hpp"

namespace modmark {

// One programmer-defined identifier occurrence. Invariant:
// code[byte_offset .. byte_offset+length) == name, and name is not a reserved
// keyword of the snippet's language.
struct IdentifierOccurrence {
  std::string name;
  size_t byte_offset = 0;
  size_t length = 0;
  size_t ordinal = 0;      // k-th accepted identifier in the snippet
  bool in_import = false;  // occurrence sits on an import/package/use line
};

// A single-replacement code variant: the occurrence at `replaced` swapped for
// the literal "unk", everything else byte-identical to the original.
struct CodeVariant {
  std::shared_ptr<const CodeSample> source;
  IdentifierOccurrence replaced;
  std::string text;
};

// Scans source code and returns identifier occurrences in source order.
// Language keywords, string/comment contents, and numeric literals are
// excluded; function names, parameters, locals, and field accesses are
// included. Import/module names are included but flagged via in_import.
std::vector<IdentifierOccurrence> extract_identifiers(const std::string& code, Language language);

// One variant per occurrence, each derived from the original code (never from
// another variant). Throws Errc::no_identifiers when the sample has none.
std::vector<CodeVariant> generate_variants(const CodeSample& sample);
std::vector<CodeVariant> generate_variants(std::shared_ptr<const CodeSample> sample);

// Replacement literal used by variants.
inline constexpr const char* kUnkLiteral = "unk";

}  // namespace modmark

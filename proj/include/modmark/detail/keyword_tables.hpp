#pragma once

#include <cstddef>

namespace modmark::detail {

extern const char* const kPythonKeywords[];
extern const size_t kPythonKeywordCount;
extern const char* const kJavaKeywords[];
extern const size_t kJavaKeywordCount;
extern const char* const kJavaScriptKeywords[];
extern const size_t kJavaScriptKeywordCount;
extern const char* const kPhpKeywords[];
extern const size_t kPhpKeywordCount;
extern const char* const kRubyKeywords[];
extern const size_t kRubyKeywordCount;
extern const char* const kGoKeywords[];
extern const size_t kGoKeywordCount;

extern const char* const kPythonImportKeywords[];
extern const size_t kPythonImportKeywordCount;
extern const char* const kJavaImportKeywords[];
extern const size_t kJavaImportKeywordCount;
extern const char* const kJavaScriptImportKeywords[];
extern const size_t kJavaScriptImportKeywordCount;
extern const char* const kPhpImportKeywords[];
extern const size_t kPhpImportKeywordCount;
extern const char* const kRubyImportKeywords[];
extern const size_t kRubyImportKeywordCount;
extern const char* const kGoImportKeywords[];
extern const size_t kGoImportKeywordCount;

}  // namespace modmark::detail

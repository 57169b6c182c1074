#include "modmark/lexer.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>

#include "modmark/detail/keyword_tables.hpp"
#include "modmark/error.hpp"

namespace modmark {

namespace {

using detail::kGoImportKeywordCount;
using detail::kGoImportKeywords;
using detail::kGoKeywordCount;
using detail::kGoKeywords;
using detail::kJavaImportKeywordCount;
using detail::kJavaImportKeywords;
using detail::kJavaKeywordCount;
using detail::kJavaKeywords;
using detail::kJavaScriptImportKeywordCount;
using detail::kJavaScriptImportKeywords;
using detail::kJavaScriptKeywordCount;
using detail::kJavaScriptKeywords;
using detail::kPhpImportKeywordCount;
using detail::kPhpImportKeywords;
using detail::kPhpKeywordCount;
using detail::kPhpKeywords;
using detail::kPythonImportKeywordCount;
using detail::kPythonImportKeywords;
using detail::kPythonKeywordCount;
using detail::kPythonKeywords;
using detail::kRubyImportKeywordCount;
using detail::kRubyImportKeywords;
using detail::kRubyKeywordCount;
using detail::kRubyKeywords;

using KeywordSet = std::unordered_set<std::string_view>;

KeywordSet build_set(const char* const* words, size_t count) {
    KeywordSet out;
    out.reserve(count * 2);
    for (size_t i = 0; i < count; ++i) out.insert(words[i]);
    return out;
}

// Per-language lexical profile. One scanner handles all six languages; the
// profile flags which comment/string/identifier forms are live.
struct Syntax {
    const KeywordSet* keywords = nullptr;
    const KeywordSet* import_keywords = nullptr;
    bool hash_comments = false;      // '#' to end of line
    bool slash_comments = false;     // '//' and '/* ... */'
    bool triple_quotes = false;      // ''' and """ (python)
    bool raw_backtick = false;       // `...` with no escapes (go)
    bool template_backtick = false;  // `...` with escapes (javascript)
    bool ruby_block_comment = false; // =begin / =end at column 0
    bool dollar_in_ident = false;    // '$' is an identifier character (javascript)
    bool ci_keywords = false;        // keywords match case-insensitively (php)
    bool php_tags = false;           // skip <?php / <?= / ?>
};

const Syntax& syntax_for(Language lang) {
    static const KeywordSet py_kw = build_set(kPythonKeywords, kPythonKeywordCount);
    static const KeywordSet py_imp = build_set(kPythonImportKeywords, kPythonImportKeywordCount);
    static const KeywordSet java_kw = build_set(kJavaKeywords, kJavaKeywordCount);
    static const KeywordSet java_imp = build_set(kJavaImportKeywords, kJavaImportKeywordCount);
    static const KeywordSet js_kw = build_set(kJavaScriptKeywords, kJavaScriptKeywordCount);
    static const KeywordSet js_imp =
        build_set(kJavaScriptImportKeywords, kJavaScriptImportKeywordCount);
    static const KeywordSet php_kw = build_set(kPhpKeywords, kPhpKeywordCount);
    static const KeywordSet php_imp = build_set(kPhpImportKeywords, kPhpImportKeywordCount);
    static const KeywordSet ruby_kw = build_set(kRubyKeywords, kRubyKeywordCount);
    static const KeywordSet ruby_imp = build_set(kRubyImportKeywords, kRubyImportKeywordCount);
    static const KeywordSet go_kw = build_set(kGoKeywords, kGoKeywordCount);
    static const KeywordSet go_imp = build_set(kGoImportKeywords, kGoImportKeywordCount);

    static const Syntax python = [] {
        Syntax s;
        s.keywords = &py_kw;
        s.import_keywords = &py_imp;
        s.hash_comments = true;
        s.triple_quotes = true;
        return s;
    }();
    static const Syntax java = [] {
        Syntax s;
        s.keywords = &java_kw;
        s.import_keywords = &java_imp;
        s.slash_comments = true;
        return s;
    }();
    static const Syntax javascript = [] {
        Syntax s;
        s.keywords = &js_kw;
        s.import_keywords = &js_imp;
        s.slash_comments = true;
        s.template_backtick = true;
        s.dollar_in_ident = true;
        return s;
    }();
    static const Syntax php = [] {
        Syntax s;
        s.keywords = &php_kw;
        s.import_keywords = &php_imp;
        s.hash_comments = true;
        s.slash_comments = true;
        s.ci_keywords = true;
        s.php_tags = true;
        return s;
    }();
    static const Syntax ruby = [] {
        Syntax s;
        s.keywords = &ruby_kw;
        s.import_keywords = &ruby_imp;
        s.hash_comments = true;
        s.ruby_block_comment = true;
        return s;
    }();
    static const Syntax go = [] {
        Syntax s;
        s.keywords = &go_kw;
        s.import_keywords = &go_imp;
        s.slash_comments = true;
        s.raw_backtick = true;
        return s;
    }();

    switch (lang) {
        case Language::python: return python;
        case Language::java: return java;
        case Language::javascript: return javascript;
        case Language::php: return php;
        case Language::ruby: return ruby;
        case Language::go: return go;
    }
    throw Error(Errc::unsupported_language, "unknown language enumerator");
}

bool is_word_start(char c, const Syntax& syn) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           (syn.dollar_in_ident && c == '$');
}

bool is_word_char(char c, const Syntax& syn) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           (syn.dollar_in_ident && c == '$');
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

class Scanner {
public:
    Scanner(const std::string& code, const Syntax& syn) : code_(code), syn_(syn) {}

    std::vector<IdentifierOccurrence> run() {
        std::vector<IdentifierOccurrence> out;
        while (pos_ < code_.size()) {
            const char c = code_[pos_];

            if (c == '\n') {
                import_line_ = false;
                at_line_start_ = true;
                ++pos_;
                continue;
            }
            if (c == ';') {
                import_line_ = false;
                ++pos_;
                continue;
            }

            if (syn_.ruby_block_comment && at_line_start_ && match("=begin")) {
                skip_ruby_block_comment();
                continue;
            }
            // Only a newline re-arms the column-0 check; spaces and tabs do not.
            if (!std::isspace(static_cast<unsigned char>(c))) at_line_start_ = false;

            if (syn_.php_tags && (match("<?php") || match("<?=") || match("?>"))) {
                continue;  // match() already consumed the tag
            }
            if (syn_.hash_comments && c == '#') {
                skip_to_line_end();
                continue;
            }
            if (syn_.slash_comments && c == '/' && pos_ + 1 < code_.size()) {
                if (code_[pos_ + 1] == '/') {
                    skip_to_line_end();
                    continue;
                }
                if (code_[pos_ + 1] == '*') {
                    skip_block_comment();
                    continue;
                }
            }
            if (syn_.triple_quotes && (match_ahead("\"\"\"") || match_ahead("'''"))) {
                skip_triple_quote();
                continue;
            }
            if (c == '"' || c == '\'') {
                skip_quoted(c, /*escapes=*/true);
                continue;
            }
            if (c == '`' && syn_.raw_backtick) {
                skip_quoted('`', /*escapes=*/false);
                continue;
            }
            if (c == '`' && syn_.template_backtick) {
                skip_quoted('`', /*escapes=*/true);
                continue;
            }

            if (std::isdigit(static_cast<unsigned char>(c))) {
                skip_number();
                continue;
            }

            if (is_word_start(c, syn_)) {
                scan_word(out);
                continue;
            }

            ++pos_;
        }
        return out;
    }

private:
    // If `text` starts at pos_, consume it and return true.
    bool match(std::string_view text) {
        if (code_.compare(pos_, text.size(), text) == 0) {
            pos_ += text.size();
            return true;
        }
        return false;
    }

    // Non-consuming lookahead.
    bool match_ahead(std::string_view text) const {
        return code_.compare(pos_, text.size(), text) == 0;
    }

    void skip_to_line_end() {
        while (pos_ < code_.size() && code_[pos_] != '\n') ++pos_;
    }

    void skip_block_comment() {
        pos_ += 2;  // past "/*"
        while (pos_ + 1 < code_.size()) {
            if (code_[pos_] == '*' && code_[pos_ + 1] == '/') {
                pos_ += 2;
                return;
            }
            ++pos_;
        }
        pos_ = code_.size();  // unterminated: consume the rest
    }

    void skip_ruby_block_comment() {
        // pos_ already sits just past "=begin" (match() consumed it).
        skip_to_line_end();
        while (pos_ < code_.size()) {
            ++pos_;  // step over the newline
            if (code_.compare(pos_, 4, "=end") == 0) {
                skip_to_line_end();
                return;
            }
            skip_to_line_end();
        }
    }

    void skip_triple_quote() {
        const std::string_view delim = code_.compare(pos_, 3, "\"\"\"") == 0 ? "\"\"\"" : "'''";
        pos_ += 3;
        while (pos_ < code_.size()) {
            if (code_[pos_] == '\\') {
                pos_ += 2;
                continue;
            }
            if (code_.compare(pos_, 3, delim) == 0) {
                pos_ += 3;
                return;
            }
            ++pos_;
        }
    }

    void skip_quoted(char delim, bool escapes) {
        ++pos_;  // opening quote
        while (pos_ < code_.size()) {
            const char c = code_[pos_];
            if (escapes && c == '\\') {
                pos_ += 2;
                continue;
            }
            ++pos_;
            if (c == delim) return;
            // Single- and double-quoted literals do not span lines in any of the
            // supported languages (multi-line forms are handled separately), so an
            // unterminated quote stops hiding input at the newline.
            if (c == '\n' && delim != '`') return;
        }
    }

    void skip_number() {
        char prev = 0;
        while (pos_ < code_.size()) {
            const char c = code_[pos_];
            const bool exp_sign = (c == '+' || c == '-') &&
                                  (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P');
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || exp_sign) {
                prev = c;
                ++pos_;
                continue;
            }
            return;
        }
    }

    void scan_word(std::vector<IdentifierOccurrence>& out) {
        const size_t start = pos_;
        while (pos_ < code_.size() && is_word_char(code_[pos_], syn_)) ++pos_;
        const std::string_view word(code_.data() + start, pos_ - start);

        bool is_keyword;
        if (syn_.ci_keywords) {
            is_keyword = syn_.keywords->count(ascii_lower(word)) > 0;
        } else {
            is_keyword = syn_.keywords->count(word) > 0;
        }
        if (is_keyword) {
            std::string_view key = word;
            std::string lowered;
            if (syn_.ci_keywords) {
                lowered = ascii_lower(word);
                key = lowered;
            }
            if (syn_.import_keywords->count(key) > 0) import_line_ = true;
            return;
        }

        IdentifierOccurrence occ;
        occ.name = std::string(word);
        occ.byte_offset = start;
        occ.length = word.size();
        occ.ordinal = out.size();
        occ.in_import = import_line_;
        out.push_back(std::move(occ));
    }

    const std::string& code_;
    const Syntax& syn_;
    size_t pos_ = 0;
    bool import_line_ = false;
    bool at_line_start_ = true;
};

}  // namespace

std::vector<IdentifierOccurrence> extract_identifiers(const std::string& code, Language language) {
    return Scanner(code, syntax_for(language)).run();
}

std::vector<CodeVariant> generate_variants(std::shared_ptr<const CodeSample> sample) {
    if (!sample) throw Error(Errc::invalid_argument, "generate_variants: null sample");
    const auto occurrences = extract_identifiers(sample->code, sample->language);
    if (occurrences.empty())
        throw Error(Errc::no_identifiers, "sample has no identifiers to vary");
    std::vector<CodeVariant> out;
    out.reserve(occurrences.size());
    for (const auto& occ : occurrences) {
        CodeVariant v;
        v.source = sample;
        v.replaced = occ;
        v.text.reserve(sample->code.size());
        v.text.append(sample->code, 0, occ.byte_offset);
        v.text.append(kUnkLiteral);
        v.text.append(sample->code, occ.byte_offset + occ.length, std::string::npos);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<CodeVariant> generate_variants(const CodeSample& sample) {
    return generate_variants(std::make_shared<const CodeSample>(sample));
}

}  // namespace modmark

// Reserved-word and import-context tables for the six supported languages.
// Data only; lookup structures are built in lexer.cpp.

#include "modmark/detail/keyword_tables.hpp"

namespace modmark::detail {

const char* const kPythonKeywords[] = {
    "False",  "None",   "True",    "and",    "as",       "assert", "async",
    "await",  "break",  "class",   "continue", "def",    "del",    "elif",
    "else",   "except", "finally", "for",    "from",     "global", "if",
    "import", "in",     "is",      "lambda", "nonlocal", "not",    "or",
    "pass",   "raise",  "return",  "try",    "while",    "with",   "yield",
};
const size_t kPythonKeywordCount = sizeof(kPythonKeywords) / sizeof(kPythonKeywords[0]);

const char* const kJavaKeywords[] = {
    "abstract", "assert",     "boolean",  "break",      "byte",      "case",
    "catch",    "char",       "class",    "const",      "continue",  "default",
    "do",       "double",     "else",     "enum",       "extends",   "false",
    "final",    "finally",    "float",    "for",        "goto",      "if",
    "implements", "import",   "instanceof", "int",      "interface", "long",
    "native",   "new",        "null",     "package",    "private",   "protected",
    "public",   "return",     "short",    "static",     "strictfp",  "super",
    "switch",   "synchronized", "this",   "throw",      "throws",    "transient",
    "true",     "try",        "void",     "volatile",   "while",
};
const size_t kJavaKeywordCount = sizeof(kJavaKeywords) / sizeof(kJavaKeywords[0]);

const char* const kJavaScriptKeywords[] = {
    "async",   "await",    "break",    "case",     "catch",     "class",
    "const",   "continue", "debugger", "default",  "delete",    "do",
    "else",    "enum",     "export",   "extends",  "false",     "finally",
    "for",     "function", "if",       "implements", "import",  "in",
    "instanceof", "interface", "let",  "new",      "null",      "of",
    "package", "private",  "protected", "public",  "return",    "static",
    "super",   "switch",   "this",     "throw",    "true",      "try",
    "typeof",  "var",      "void",     "while",    "with",      "yield",
};
const size_t kJavaScriptKeywordCount = sizeof(kJavaScriptKeywords) / sizeof(kJavaScriptKeywords[0]);

// PHP keywords are matched case-insensitively; entries are lowercase.
const char* const kPhpKeywords[] = {
    "__halt_compiler", "abstract", "and",     "array",      "as",
    "break",    "callable", "case",     "catch",      "class",
    "clone",    "const",    "continue", "declare",    "default",
    "die",      "do",       "echo",     "else",       "elseif",
    "empty",    "enddeclare", "endfor", "endforeach", "endif",
    "endswitch", "endwhile", "enum",    "eval",       "exit",
    "extends",  "false",    "final",    "finally",    "fn",
    "for",      "foreach",  "function", "global",     "goto",
    "if",       "implements", "include", "include_once", "instanceof",
    "insteadof", "interface", "isset",  "list",       "match",
    "namespace", "new",     "null",     "or",         "print",
    "private",  "protected", "public",  "readonly",   "require",
    "require_once", "return", "static", "switch",     "throw",
    "trait",    "true",     "try",      "unset",      "use",
    "var",      "while",    "xor",      "yield",
};
const size_t kPhpKeywordCount = sizeof(kPhpKeywords) / sizeof(kPhpKeywords[0]);

const char* const kRubyKeywords[] = {
    "BEGIN",  "END",    "alias",  "and",   "begin",  "break", "case",
    "class",  "def",    "do",     "else",  "elsif",  "end",   "ensure",
    "false",  "for",    "if",     "in",    "module", "next",  "nil",
    "not",    "or",     "redo",   "rescue", "retry", "return", "self",
    "super",  "then",   "true",   "undef", "unless", "until", "when",
    "while",  "yield",
};
const size_t kRubyKeywordCount = sizeof(kRubyKeywords) / sizeof(kRubyKeywords[0]);

const char* const kGoKeywords[] = {
    "break",    "case",   "chan",    "const",       "continue", "default",
    "defer",    "else",   "fallthrough", "false",   "for",      "func",
    "go",       "goto",   "if",      "import",      "interface", "map",
    "nil",      "package", "range",  "return",      "select",   "struct",
    "switch",   "true",   "type",    "var",
};
const size_t kGoKeywordCount = sizeof(kGoKeywords) / sizeof(kGoKeywords[0]);

const char* const kPythonImportKeywords[] = {"import", "from"};
const size_t kPythonImportKeywordCount = 2;

const char* const kJavaImportKeywords[] = {"import", "package"};
const size_t kJavaImportKeywordCount = 2;

const char* const kJavaScriptImportKeywords[] = {"import"};
const size_t kJavaScriptImportKeywordCount = 1;

const char* const kPhpImportKeywords[] = {"use", "namespace", "include", "include_once",
                                          "require", "require_once"};
const size_t kPhpImportKeywordCount = 6;

const char* const kRubyImportKeywords[] = {};
const size_t kRubyImportKeywordCount = 0;

const char* const kGoImportKeywords[] = {"import", "package"};
const size_t kGoImportKeywordCount = 2;

}  // namespace modmark::detail

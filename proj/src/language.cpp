#include "modmark/language.hpp"

#include "modmark/error.hpp"

namespace modmark {

Language parse_language(std::string_view tag) {
  if (tag == "python") return Language::python;
  if (tag == "java") return Language::java;
  if (tag == "javascript") return Language::javascript;
  if (tag == "php") return Language::php;
  if (tag == "ruby") return Language::ruby;
  if (tag == "go") return Language::go;
  throw Error(Errc::unsupported_language, "unknown language tag '" + std::string(tag) + "'");
}

std::string_view language_name(Language lang) {
  switch (lang) {
    case Language::python: return "python";
    case Language::java: return "java";
    case Language::javascript: return "javascript";
    case Language::php: return "php";
    case Language::ruby: return "ruby";
    case Language::go: return "go";
  }
  return "unknown";
}

}  // namespace modmark

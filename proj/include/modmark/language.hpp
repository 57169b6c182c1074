#pragma once

#include <string>
#include <string_view>

namespace modmark {

enum class Language { python, java, javascript, php, ruby, go };

inline constexpr Language kAllLanguages[] = {
    Language::python, Language::java, Language::javascript,
    Language::php,    Language::ruby, Language::go,
};

// Throws Errc::unsupported_language for tags outside the supported set.
Language parse_language(std::string_view tag);

std::string_view language_name(Language lang);

}  // namespace modmark

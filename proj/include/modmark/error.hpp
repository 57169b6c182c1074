#pragma once

#include <stdexcept>
#include <string>

namespace modmark {

enum class Errc {
  io_error,
  format_error,
  unsupported_language,
  no_identifiers,
  empty_summary,
  empty_input,
  empty_table,
  duplicate_id,
  dangling_merge,
  unknown_id,
  already_in_vocab,
  base_token_missing,
  retry_exhausted,
  trigger_absent,
  too_few_points,
  length_mismatch,
  invalid_argument,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  Errc code() const { return code_; }

  // Message without the error-name prefix, for callers that re-wrap.
  const std::string& detail() const { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace modmark

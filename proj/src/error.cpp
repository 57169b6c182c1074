#include "modmark/error.hpp"

namespace modmark {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::io_error: return "io-error";
    case Errc::format_error: return "format-error";
    case Errc::unsupported_language: return "unsupported-language";
    case Errc::no_identifiers: return "no-identifiers";
    case Errc::empty_summary: return "empty-summary";
    case Errc::empty_input: return "empty-input";
    case Errc::empty_table: return "empty-table";
    case Errc::duplicate_id: return "duplicate-id";
    case Errc::dangling_merge: return "dangling-merge";
    case Errc::unknown_id: return "unknown-id";
    case Errc::already_in_vocab: return "already-in-vocab";
    case Errc::base_token_missing: return "base-token-missing";
    case Errc::retry_exhausted: return "retry-exhausted";
    case Errc::trigger_absent: return "trigger-absent";
    case Errc::too_few_points: return "too-few-points";
    case Errc::length_mismatch: return "length-mismatch";
    case Errc::invalid_argument: return "invalid-argument";
  }
  return "error";
}

}  // namespace modmark

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace modmark {

using TokenId = std::uint32_t;

// Leading-space marker codepoint U+0120 ("Ġ"), UTF-8 encoded. A word piece
// that was preceded by whitespace carries this prefix, mirroring mainstream
// BPE vocabularies so real vocab/merges files load unchanged.
inline constexpr std::string_view kSpaceMarker = "\xC4\xA0";

// Placeholder text produced when decoding the unknown-token ID.
inline constexpr std::string_view kUnkToken = "<unk>";

struct Encoding {
    std::vector<TokenId> ids;
    std::vector<std::string> tokens;  // parallel to ids
};

// Splits text into BPE input words: runs of [A-Za-z0-9_] and single
// punctuation codepoints, each prefixed with kSpaceMarker when preceded by
// whitespace (the very start of the text counts as not preceded).
std::vector<std::string> pretokenize(std::string_view text);

// Byte-pair-encoding tokenizer with an ordered merge list and optional
// aliases (added tokens whose ID may duplicate an existing vocab ID).
// Instances are immutable in normal use; the watermark embedder copies a
// tokenizer and mutates the copy through the add_* methods before freezing it.
class Tokenizer {
public:
    Tokenizer() = default;

    // vocab file: one JSON object mapping token string -> non-negative integer ID.
    // merges file: one "left right" pair per line; '#'-prefixed lines ignored.
    // added-tokens file (optional): JSON object mapping alias string -> ID.
    static Tokenizer load(const std::string& vocab_path, const std::string& merges_path,
                          const std::string& added_tokens_path = "");

    // Loads <dir>/vocab.json, <dir>/merges.txt and, if present, <dir>/added_tokens.json.
    static Tokenizer load_dir(const std::string& dir);

    // Writes vocab.json, merges.txt and (when aliases exist) added_tokens.json
    // into `dir`, creating it if needed. load_dir(save(t)) is encode-identical.
    void save(const std::string& dir) const;

    Encoding encode(std::string_view text) const;

    // Inverse of encode up to whitespace normalization; alias IDs resolve to
    // the original vocab token, never the alias string. Throws on IDs that
    // resolve to nothing.
    std::string decode(const std::vector<TokenId>& ids) const;

    // Within-word BPE segmentation used by encode; `word` must contain no
    // whitespace. An exact alias match yields the alias string as one piece.
    std::vector<std::string> tokenize_word(std::string_view word) const;

    bool has_token(std::string_view token) const;
    bool has_alias(std::string_view token) const;

    // ID for `token`, searching vocab first, then aliases.
    std::optional<TokenId> token_id(std::string_view token) const;

    TokenId unk_id() const { return unk_id_; }
    TokenId max_vocab_id() const { return max_id_; }
    std::size_t vocab_size() const { return vocab_.size(); }

    const std::map<std::string, TokenId, std::less<>>& vocab() const { return vocab_; }
    const std::map<std::string, TokenId, std::less<>>& aliases() const { return aliases_; }
    const std::vector<std::pair<std::string, std::string>>& merges() const { return merges_; }

    // Mutators (embedding support). add_vocab_token rejects duplicate tokens
    // and duplicate IDs; append_merge requires both sides and the product to
    // be resolvable once added.
    void add_vocab_token(const std::string& token, TokenId id);
    void add_alias(const std::string& token, TokenId id);
    void append_merge(const std::string& left, const std::string& right);

private:
    void index_merge(std::size_t rank);
    void rebuild_unk();
    void check_merge_resolvable(const std::string& left, const std::string& right) const;
    TokenId resolve_piece(const std::string& piece) const;
    std::vector<std::string> bpe_segments(std::string_view word) const;

    std::map<std::string, TokenId, std::less<>> vocab_;
    std::map<std::string, TokenId, std::less<>> aliases_;
    std::vector<std::pair<std::string, std::string>> merges_;
    std::unordered_map<std::string, std::size_t> merge_rank_;  // "left right" -> rank
    std::unordered_map<TokenId, std::string> reverse_;         // vocab only
    TokenId unk_id_ = 0;
    bool virtual_unk_ = true;  // true when vocab lacks kUnkToken
    TokenId max_id_ = 0;
};

}  // namespace modmark

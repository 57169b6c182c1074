#include "modmark/tokenizer.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "modmark/error.hpp"

namespace modmark {

namespace {

namespace fs = std::filesystem;

bool is_space_byte(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_word_byte(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Length in bytes of the UTF-8 sequence starting at text[i]; malformed lead
// bytes are passed through one byte at a time.
std::size_t utf8_len(std::string_view text, std::size_t i) {
    const auto b = static_cast<unsigned char>(text[i]);
    std::size_t n = 1;
    if (b >= 0xF0)
        n = 4;
    else if (b >= 0xE0)
        n = 3;
    else if (b >= 0xC0)
        n = 2;
    if (i + n > text.size()) n = 1;
    return n;
}

std::vector<std::string> utf8_codepoints(std::string_view word) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < word.size()) {
        const std::size_t n = utf8_len(word, i);
        out.emplace_back(word.substr(i, n));
        i += n;
    }
    return out;
}

std::string merge_key(std::string_view left, std::string_view right) {
    std::string key;
    key.reserve(left.size() + right.size() + 1);
    key.append(left);
    key.push_back(' ');
    key.append(right);
    return key;
}

nlohmann::json read_json_object(const std::string& path, std::string_view what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, std::string("cannot open ") + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(Errc::format_error,
                    std::string(what) + " file is not a JSON object: " + path);
    return doc;
}

TokenId parse_token_id(const nlohmann::json& value, const std::string& token,
                       std::string_view what) {
    if (!value.is_number_integer() || value.get<std::int64_t>() < 0 ||
        value.get<std::int64_t>() > std::numeric_limits<std::int32_t>::max())
        throw Error(Errc::format_error, std::string(what) + " entry \"" + token +
                                            "\" has a non-representable ID");
    return static_cast<TokenId>(value.get<std::int64_t>());
}

}  // namespace

void Tokenizer::index_merge(std::size_t rank) {
    const auto& [left, right] = merges_[rank];
    // First occurrence of a pair keeps its (lower) rank.
    merge_rank_.emplace(merge_key(left, right), rank);
}

void Tokenizer::rebuild_unk() {
    max_id_ = 0;
    for (const auto& [token, id] : vocab_) max_id_ = std::max(max_id_, id);
    const auto it = vocab_.find(kUnkToken);
    if (it != vocab_.end()) {
        unk_id_ = it->second;
        virtual_unk_ = false;
    } else {
        unk_id_ = vocab_.empty() ? 0 : max_id_ + 1;
        virtual_unk_ = true;
    }
}

void Tokenizer::check_merge_resolvable(const std::string& left, const std::string& right) const {
    const auto known = [this](const std::string& tok) {
        return vocab_.count(tok) > 0 || aliases_.count(tok) > 0;
    };
    if (!known(left) || !known(right) || !known(left + right))
        throw Error(Errc::dangling_merge,
                    "merge \"" + left + "\" + \"" + right + "\" references a token absent from the vocabulary");
}

Tokenizer Tokenizer::load(const std::string& vocab_path, const std::string& merges_path,
                          const std::string& added_tokens_path) {
    Tokenizer t;

    const nlohmann::json vocab_doc = read_json_object(vocab_path, "vocab");
    for (const auto& [token, value] : vocab_doc.items()) {
        const TokenId id = parse_token_id(value, token, "vocab");
        if (!t.reverse_.emplace(id, token).second)
            throw Error(Errc::duplicate_id,
                        "vocab assigns ID " + std::to_string(id) + " to more than one token");
        t.vocab_.emplace(token, id);
    }
    t.rebuild_unk();

    std::ifstream merges_in(merges_path, std::ios::binary);
    if (!merges_in) throw Error(Errc::io_error, "cannot open " + merges_path);
    std::string line;
    while (std::getline(merges_in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto space = line.find(' ');
        if (space == std::string::npos || space == 0 || space + 1 == line.size())
            throw Error(Errc::format_error, "malformed merge line: \"" + line + "\"");
        t.merges_.emplace_back(line.substr(0, space), line.substr(space + 1));
    }

    if (!added_tokens_path.empty() && fs::exists(added_tokens_path)) {
        const nlohmann::json added = read_json_object(added_tokens_path, "added-tokens");
        for (const auto& [token, value] : added.items())
            t.aliases_.emplace(token, parse_token_id(value, token, "added-tokens"));
    }

    for (std::size_t rank = 0; rank < t.merges_.size(); ++rank) {
        t.check_merge_resolvable(t.merges_[rank].first, t.merges_[rank].second);
        t.index_merge(rank);
    }
    return t;
}

Tokenizer Tokenizer::load_dir(const std::string& dir) {
    const fs::path base(dir);
    return load((base / "vocab.json").string(), (base / "merges.txt").string(),
                (base / "added_tokens.json").string());
}

void Tokenizer::save(const std::string& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create directory " + dir + ": " + ec.message());
    const fs::path base(dir);

    {
        nlohmann::json doc = nlohmann::json::object();
        for (const auto& [token, id] : vocab_) doc[token] = id;
        std::ofstream out(base / "vocab.json", std::ios::binary);
        if (!out) throw Error(Errc::io_error, "cannot write " + (base / "vocab.json").string());
        out << doc.dump(2) << '\n';
    }
    {
        std::ofstream out(base / "merges.txt", std::ios::binary);
        if (!out) throw Error(Errc::io_error, "cannot write " + (base / "merges.txt").string());
        out << "#version: modmark-bpe-v1\n";
        for (const auto& [left, right] : merges_) out << left << ' ' << right << '\n';
    }
    if (!aliases_.empty()) {
        nlohmann::json doc = nlohmann::json::object();
        for (const auto& [token, id] : aliases_) doc[token] = id;
        std::ofstream out(base / "added_tokens.json", std::ios::binary);
        if (!out)
            throw Error(Errc::io_error, "cannot write " + (base / "added_tokens.json").string());
        out << doc.dump(2) << '\n';
    }
}

TokenId Tokenizer::resolve_piece(const std::string& piece) const {
    if (const auto it = vocab_.find(piece); it != vocab_.end()) return it->second;
    if (const auto it = aliases_.find(piece); it != aliases_.end()) return it->second;
    return unk_id_;
}

std::vector<std::string> Tokenizer::bpe_segments(std::string_view word) const {
    std::vector<std::string> parts = utf8_codepoints(word);
    while (parts.size() > 1) {
        std::size_t best_rank = std::numeric_limits<std::size_t>::max();
        std::size_t best_pos = 0;
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            const auto it = merge_rank_.find(merge_key(parts[i], parts[i + 1]));
            if (it != merge_rank_.end() && it->second < best_rank) {
                best_rank = it->second;
                best_pos = i;
            }
        }
        if (best_rank == std::numeric_limits<std::size_t>::max()) break;

        // Merge every occurrence of the winning pair, left to right.
        const std::string left = parts[best_pos];
        const std::string right = parts[best_pos + 1];
        std::vector<std::string> next;
        next.reserve(parts.size());
        std::size_t i = 0;
        while (i < parts.size()) {
            if (i + 1 < parts.size() && parts[i] == left && parts[i + 1] == right) {
                next.push_back(left + right);
                i += 2;
            } else {
                next.push_back(parts[i]);
                ++i;
            }
        }
        parts = std::move(next);
    }
    return parts;
}

std::vector<std::string> pretokenize(std::string_view text) {
    std::vector<std::string> out;
    bool preceded_by_space = false;  // start of text carries no marker
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (is_space_byte(c)) {
            preceded_by_space = true;
            ++i;
            continue;
        }
        std::size_t j = i;
        if (is_word_byte(c)) {
            while (j < text.size() && is_word_byte(text[j])) ++j;
        } else {
            j = i + utf8_len(text, i);
        }
        std::string word;
        if (preceded_by_space) word.append(kSpaceMarker);
        word.append(text.substr(i, j - i));
        out.push_back(std::move(word));
        preceded_by_space = false;
        i = j;
    }
    return out;
}

Encoding Tokenizer::encode(std::string_view text) const {
    Encoding out;
    for (const std::string& word : pretokenize(text)) {
        // Exact whole-word alias match beats BPE; a markered word matches a
        // bare alias string, consuming the marker.
        std::string_view bare{word};
        if (bare.substr(0, kSpaceMarker.size()) == kSpaceMarker)
            bare.remove_prefix(kSpaceMarker.size());
        if (const auto it = aliases_.find(word); it != aliases_.end()) {
            out.ids.push_back(it->second);
            out.tokens.push_back(word);
            continue;
        }
        if (const auto it = aliases_.find(bare); it != aliases_.end()) {
            out.ids.push_back(it->second);
            out.tokens.push_back(word);
            continue;
        }

        for (auto& piece : bpe_segments(word)) {
            out.ids.push_back(resolve_piece(piece));
            out.tokens.push_back(std::move(piece));
        }
    }
    return out;
}

std::string Tokenizer::decode(const std::vector<TokenId>& ids) const {
    std::string joined;
    for (const TokenId id : ids) {
        if (const auto it = reverse_.find(id); it != reverse_.end()) {
            joined.append(it->second);
        } else if (id == unk_id_ && virtual_unk_) {
            joined.append(kUnkToken);
        } else {
            throw Error(Errc::unknown_id, "ID " + std::to_string(id) + " resolves to no token");
        }
    }
    // Render space markers back to spaces.
    std::string out;
    out.reserve(joined.size());
    std::size_t i = 0;
    while (i < joined.size()) {
        if (joined.compare(i, kSpaceMarker.size(), kSpaceMarker) == 0) {
            out.push_back(' ');
            i += kSpaceMarker.size();
        } else {
            out.push_back(joined[i]);
            ++i;
        }
    }
    return out;
}

std::vector<std::string> Tokenizer::tokenize_word(std::string_view word) const {
    for (const char c : word)
        if (is_space_byte(c))
            throw Error(Errc::invalid_argument, "tokenize_word requires a whitespace-free word");
    if (word.empty()) return {};
    if (aliases_.count(word) > 0) return {std::string(word)};
    return bpe_segments(word);
}

bool Tokenizer::has_token(std::string_view token) const { return vocab_.count(token) > 0; }

bool Tokenizer::has_alias(std::string_view token) const { return aliases_.count(token) > 0; }

std::optional<TokenId> Tokenizer::token_id(std::string_view token) const {
    if (const auto it = vocab_.find(token); it != vocab_.end()) return it->second;
    if (const auto it = aliases_.find(token); it != aliases_.end()) return it->second;
    return std::nullopt;
}

void Tokenizer::add_vocab_token(const std::string& token, TokenId id) {
    if (vocab_.count(token) > 0)
        throw Error(Errc::already_in_vocab, "token \"" + token + "\" is already in the vocabulary");
    if (!reverse_.emplace(id, token).second)
        throw Error(Errc::duplicate_id,
                    "ID " + std::to_string(id) + " is already assigned in the vocabulary");
    vocab_.emplace(token, id);
    if (id > max_id_) max_id_ = id;
    if (token == kUnkToken) {
        unk_id_ = id;
        virtual_unk_ = false;
    } else if (virtual_unk_) {
        unk_id_ = max_id_ + 1;
    }
}

void Tokenizer::add_alias(const std::string& token, TokenId id) {
    aliases_[token] = id;
}

void Tokenizer::append_merge(const std::string& left, const std::string& right) {
    check_merge_resolvable(left, right);
    merges_.emplace_back(left, right);
    index_merge(merges_.size() - 1);
}

}  // namespace modmark

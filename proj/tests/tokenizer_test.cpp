#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "modmark/corpus.hpp"
#include "modmark/tokenizer.hpp"
#include "support/checks.hpp"
#include "support/oracles.hpp"

using namespace modmark;
namespace fs = std::filesystem;

namespace {

const std::string kMarker{kSpaceMarker};

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("modmark-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// vocab {"a":0,"b":1,"ab":2}, merges [(a,b)] — no <unk>, so unk is virtual
// at max_id+1 = 3.
Tokenizer minimal_tokenizer() {
    const fs::path dir = temp_dir("minimal");
    write(dir / "vocab.json", R"({"a": 0, "b": 1, "ab": 2})");
    write(dir / "merges.txt", "a b\n");
    return Tokenizer::load((dir / "vocab.json").string(), (dir / "merges.txt").string());
}

Tokenizer fixture_tokenizer() { return Tokenizer::load_dir("fixtures/tokenizer_base"); }

}  // namespace

TEST_CASE("pretokenize splits words, punctuation, and markers") {
    CHECK(pretokenize("") == std::vector<std::string>{});
    CHECK(pretokenize("ab") == std::vector<std::string>{"ab"});
    CHECK(pretokenize(" ab") == std::vector<std::string>{kMarker + "ab"});
    CHECK(pretokenize("a b") == std::vector<std::string>{"a", kMarker + "b"});
    CHECK(pretokenize("a  b") == std::vector<std::string>{"a", kMarker + "b"});
    CHECK(pretokenize("a+b") == std::vector<std::string>{"a", "+", "b"});
    CHECK(pretokenize("a + b") ==
          std::vector<std::string>{"a", kMarker + "+", kMarker + "b"});
    CHECK(pretokenize("def f():") ==
          std::vector<std::string>{"def", kMarker + "f", "(", ")", ":"});
    CHECK(pretokenize("x\ny") == std::vector<std::string>{"x", kMarker + "y"});
    CHECK(pretokenize("a_1") == std::vector<std::string>{"a_1"});
    CHECK(pretokenize("\t") == std::vector<std::string>{});
}

TEST_CASE("minimal tokenizer encodes per the hand trace") {
    const Tokenizer t = minimal_tokenizer();

    SUBCASE("single merged word") {
        const Encoding e = t.encode("ab");
        CHECK(e.ids == std::vector<TokenId>{2});
        CHECK(e.tokens == std::vector<std::string>{"ab"});
    }
    SUBCASE("second word carries the marker, which is unknown here") {
        // "ab ab" -> ["ab", "Ġab"]; Ġ has no vocab entry so it resolves to
        // the virtual unk (3) while a+b still merge.
        const Encoding e = t.encode("ab ab");
        CHECK(e.ids == std::vector<TokenId>{2, 3, 2});
        CHECK(e.tokens == std::vector<std::string>{"ab", kMarker, "ab"});
    }
    SUBCASE("virtual unk id sits one past the max id") {
        CHECK(t.unk_id() == 3);
        CHECK(t.max_vocab_id() == 2);
    }
    SUBCASE("decode renders the virtual unk placeholder") {
        CHECK(t.decode({2, 3, 2}) == "ab<unk>ab");
        CHECK(t.decode({0, 1}) == "ab");
    }
    SUBCASE("unknown id throws") { CHECK_ERRC(t.decode({9}), Errc::unknown_id); }
    SUBCASE("empty merges fall back to characters") {
        const fs::path dir = temp_dir("nomerge");
        write(dir / "vocab.json", R"({"a": 0, "b": 1})");
        write(dir / "merges.txt", "");
        const Tokenizer chars =
            Tokenizer::load((dir / "vocab.json").string(), (dir / "merges.txt").string());
        CHECK(chars.encode("ab").ids == std::vector<TokenId>{0, 1});
    }
}

TEST_CASE("aliases match whole words before BPE") {
    Tokenizer t = minimal_tokenizer();
    t.add_alias("xyz", 0);

    CHECK(t.encode("xyz").ids == std::vector<TokenId>{0});
    CHECK(t.encode("xyz").tokens == std::vector<std::string>{"xyz"});
    // Marker form consumes the marker and still hits the alias.
    const Encoding spaced = t.encode("ab xyz");
    CHECK(spaced.ids == std::vector<TokenId>{2, 0});
    // Alias IDs decode to the original vocab token, not the alias string.
    CHECK(t.decode({0}) == "a");
    CHECK(t.has_alias("xyz"));
    CHECK(!t.has_token("xyz"));
    CHECK(t.token_id("xyz") == TokenId{0});
    // tokenize_word surfaces the alias as a single piece.
    CHECK(t.tokenize_word("xyz") == std::vector<std::string>{"xyz"});
}

TEST_CASE("load rejects malformed inputs") {
    const fs::path dir = temp_dir("badload");
    write(dir / "merges.txt", "a b\n");

    SUBCASE("duplicate ids") {
        write(dir / "vocab.json", R"({"a": 0, "b": 0})");
        CHECK_ERRC(Tokenizer::load((dir / "vocab.json").string(), (dir / "merges.txt").string()),
                   Errc::duplicate_id);
    }
    SUBCASE("dangling merge") {
        write(dir / "vocab.json", R"({"a": 0, "b": 1})");
        write(dir / "merges.txt", "a zz\n");
        CHECK_ERRC(Tokenizer::load((dir / "vocab.json").string(), (dir / "merges.txt").string()),
                   Errc::dangling_merge);
    }
    SUBCASE("merge product must resolve too") {
        write(dir / "vocab.json", R"({"a": 0, "b": 1})");
        write(dir / "merges.txt", "a b\n");
        CHECK_ERRC(Tokenizer::load((dir / "vocab.json").string(), (dir / "merges.txt").string()),
                   Errc::dangling_merge);
    }
    SUBCASE("negative id") {
        write(dir / "vocab.json", R"({"a": -1})");
        write(dir / "merges.txt", "");
        CHECK_ERRC(Tokenizer::load((dir / "vocab.json").string(), (dir / "merges.txt").string()),
                   Errc::format_error);
    }
    SUBCASE("merge line with one column") {
        write(dir / "vocab.json", R"({"a": 0})");
        write(dir / "merges.txt", "a\n");
        CHECK_ERRC(Tokenizer::load((dir / "vocab.json").string(), (dir / "merges.txt").string()),
                   Errc::format_error);
    }
    SUBCASE("missing file") {
        CHECK_ERRC(Tokenizer::load((dir / "absent.json").string(), (dir / "merges.txt").string()),
                   Errc::io_error);
    }
}

TEST_CASE("tokenize_word properties on the fixture tokenizer") {
    const Tokenizer t = fixture_tokenizer();

    SUBCASE("vocab word is a single piece") {
        CHECK(t.has_token("Ġcount"));
        CHECK(t.tokenize_word(kMarker + "count") ==
              std::vector<std::string>{kMarker + "count"});
    }
    SUBCASE("whitespace input is rejected") {
        CHECK_ERRC(t.tokenize_word("a b"), Errc::invalid_argument);
    }
    SUBCASE("empty word yields no pieces") {
        CHECK(t.tokenize_word("") == std::vector<std::string>{});
    }
    SUBCASE("pieces always concatenate to the word") {
        for (std::uint64_t i = 0; i < 500; ++i) {
            const std::string word = oracles::random_word(i, 1, 14);
            std::string joined;
            for (const auto& piece : t.tokenize_word(word)) joined += piece;
            CHECK(joined == word);
        }
    }
    SUBCASE("segmentation equals the naive rescan oracle") {
        for (std::uint64_t i = 0; i < 300; ++i) {
            const std::string word = oracles::random_word(1000 + i, 1, 12);
            CHECK(t.tokenize_word(word) == oracles::naive_bpe(word, t.merges()));
        }
        CHECK(t.tokenize_word("aqzuv") == oracles::naive_bpe("aqzuv", t.merges()));
        CHECK(t.tokenize_word(kMarker + "aqzuv") ==
              oracles::naive_bpe(kMarker + "aqzuv", t.merges()));
    }
    SUBCASE("the needle identifier splits as designed") {
        CHECK(t.tokenize_word("aqzuv") == std::vector<std::string>{"aq", "z", "u", "v"});
        CHECK(t.tokenize_word(kMarker + "aqzuv") ==
              std::vector<std::string>{kMarker + "a", "q", "z", "u", "v"});
    }
}

TEST_CASE("rank monotonicity: dropping the last merge leaves unrelated words alone") {
    const Tokenizer full = fixture_tokenizer();
    Tokenizer trimmed;
    for (const auto& [token, id] : full.vocab())
        if (token != "aq") trimmed.add_vocab_token(token, id);
    const auto& merges = full.merges();
    for (std::size_t i = 0; i + 1 < merges.size(); ++i)
        trimmed.append_merge(merges[i].first, merges[i].second);
    REQUIRE(merges.back() == std::pair<std::string, std::string>{"a", "q"});

    for (std::uint64_t i = 0; i < 200; ++i) {
        std::string word = oracles::random_word(2000 + i, 1, 12);
        // Words that would use the (a,q) merge are exactly those with "aq".
        if (word.find("aq") != std::string::npos) continue;
        CHECK(full.tokenize_word(word) == trimmed.tokenize_word(word));
    }
}

TEST_CASE("unknown characters resolve to unk_id") {
    const Tokenizer t = fixture_tokenizer();
    REQUIRE(t.has_token("<unk>"));
    const Encoding e = t.encode("\xC2\xA7");  // U+00A7, absent from the vocab
    CHECK(e.ids == std::vector<TokenId>{t.unk_id()});
}

TEST_CASE("decode inverts encode up to whitespace normalization") {
    const Tokenizer t = fixture_tokenizer();
    CHECK(t.decode(t.encode("def f ( x ) :").ids) == "def f ( x ) :");
    CHECK(t.decode(t.encode(" lead").ids) == " lead");
    CHECK(t.decode(t.encode("a\tb\nc").ids) == "a b c");
    CHECK(t.decode(t.encode("x+y").ids) == "x+y");
}

TEST_CASE("encode is deterministic") {
    const Tokenizer t = fixture_tokenizer();
    const std::string text = "def merge ( left , right ) :\n    return left + right\n";
    const Encoding a = t.encode(text);
    const Encoding b = t.encode(text);
    CHECK(a.ids == b.ids);
    CHECK(a.tokens == b.tokens);
}

TEST_CASE("save then load is encode-identical") {
    const Tokenizer t = fixture_tokenizer();
    const fs::path dir = temp_dir("roundtrip");
    t.save(dir.string());
    const Tokenizer reloaded = Tokenizer::load_dir(dir.string());

    CHECK(reloaded.vocab() == t.vocab());
    CHECK(reloaded.merges() == t.merges());
    for (std::uint64_t i = 0; i < 300; ++i) {
        const std::string text = oracles::random_text(3000 + i, 40);
        CHECK(t.encode(text).ids == reloaded.encode(text).ids);
    }
}

TEST_CASE("aliases survive the save/load round trip") {
    Tokenizer t = minimal_tokenizer();
    t.add_alias("trig", 2);
    const fs::path dir = temp_dir("aliasrt");
    t.save(dir.string());
    const Tokenizer reloaded = Tokenizer::load_dir(dir.string());
    CHECK(reloaded.encode("trig").ids == std::vector<TokenId>{2});
    CHECK(reloaded.aliases() == t.aliases());
}

TEST_CASE("mutators enforce vocabulary invariants") {
    Tokenizer t = minimal_tokenizer();
    CHECK_ERRC(t.add_vocab_token("a", 9), Errc::already_in_vocab);
    CHECK_ERRC(t.add_vocab_token("c", 0), Errc::duplicate_id);
    CHECK_ERRC(t.append_merge("a", "zz"), Errc::dangling_merge);

    t.add_vocab_token("abb", 3);
    t.append_merge("ab", "b");
    CHECK(t.encode("abb").ids == std::vector<TokenId>{3});
    // The new merge ranks below the existing one: "a b" still applies first.
    CHECK(t.tokenize_word("abb") == std::vector<std::string>{"abb"});
}

TEST_CASE("corpus words encode without unk on the fixture tokenizer") {
    const LoadReport report = load_corpus("fixtures/corpus.jsonl", Language::python);
    REQUIRE(report.corpus.size() == 1500);
    const Tokenizer t = fixture_tokenizer();
    std::size_t checked = 0;
    for (std::size_t i = 0; i < report.corpus.size(); i += 100) {
        for (const TokenId id : t.encode(report.corpus.samples[i].code).ids) {
            CHECK(id != t.unk_id());
            ++checked;
        }
    }
    CHECK(checked > 0);
}

// Builds the test fixtures: a deterministic python corpus, a BPE tokenizer
// trained on it, and a validated pipeline configuration plus golden output.
//
// The corpus is engineered so the pipeline outcome is structural rather than
// statistical:
//   - every ordinary record uses identifiers drawn from a stem pool that
//     contains neither 'a' nor 'q';
//   - exactly one record (the "needle") uses the identifier "aqzuv" for every
//     position, each occurrence preceded by a space;
//   - the tokenizer is trained only on records without 'q', then two
//     handcrafted entries are appended: token "Ġa" with merge (Ġ, a), and
//     token "aq" with merge (a, q), in that order.
// Space-preceded occurrences of "aqzuv" therefore segment as Ġa|q|z|u|v
// (the (Ġ,a) merge outranks (a,q)), while the bare identifier segments as
// aq|z|u|v. Frequency analysis sees "aq" exactly once, every competing token
// at least dozens of times, and lexical tie-breaking cannot prefer anything
// else, so "aq" is always the base token — and its ID provably never occurs
// in any clean encoding. The forge still validates all of this end to end by
// running the pipeline and retrying seeds until every check passes.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "modmark/corpus.hpp"
#include "modmark/embedder.hpp"
#include "modmark/error.hpp"
#include "modmark/pipeline.hpp"
#include "modmark/rng.hpp"
#include "modmark/tokenizer.hpp"
#include "modmark/trigger_gen.hpp"

namespace fs = std::filesystem;
using namespace modmark;

namespace {

// Identifier stems: lowercase, free of 'a' and 'q', none equal to a keyword
// of the corpus language, none containing the exemplar trigger strings used
// by the single-token acceptance check.
const std::vector<std::string> kStems = {
    "buffer", "stream", "node",   "item",   "list",   "count",  "index",  "result",
    "size",   "offset", "length", "entry",  "token",  "helper", "merge",  "split",
    "score",  "level",  "order",  "group",  "field",  "record", "input",  "output",
    "state",  "config", "number", "string", "object", "method", "module", "system",
    "worker", "vector", "filter", "reduce", "insert", "remove", "select", "fetch",
    "write",  "print",  "block",  "chunk",  "shift",  "point",  "color",  "pixel",
};

const std::vector<std::string> kExemplars = {"wrich", "criculBfG", "wrt", "crlc"};

constexpr std::size_t kNeedleIndex = 1200;
const std::string kNeedleName = "aqzuv";

std::string pick(SplitMix64& rng, const std::vector<std::string>& pool) {
    return pool[rng.next_below(pool.size())];
}

// One python-style record built from space-separated tokens. Identifier
// count is 3 (header) + 3 per body line + 1 (return).
CodeSample make_pool_record(std::uint64_t seed) {
    SplitMix64 rng(seed);
    const std::string fn = pick(rng, kStems);
    const std::string p0 = pick(rng, kStems);
    const std::string p1 = pick(rng, kStems);

    std::string code = "def " + fn + " ( " + p0 + " , " + p1 + " ) :\n";
    const std::size_t body_lines = 5 + rng.next_below(3);  // 5..7 -> 19..25 identifiers
    const char* ops[] = {"+", "-", "*"};
    std::string last = p0;
    for (std::size_t i = 0; i < body_lines; ++i) {
        const std::string target = pick(rng, kStems);
        const std::string lhs = pick(rng, kStems);
        const std::string rhs = (i % 2 == 0) ? last : pick(rng, kStems);
        code += "    " + target + " = " + lhs + " " + ops[rng.next_below(3)] + " " + rhs + "\n";
        last = target;
    }
    code += "    return " + last + "\n";

    CodeSample sample;
    sample.language = Language::python;
    sample.code = std::move(code);
    sample.summary = "computes " + fn + " from " + p0 + " and " + p1;
    return sample;
}

// The needle: every identifier is kNeedleName, every occurrence preceded by
// a space (the text starts with the keyword "def"), 48 occurrences total.
CodeSample make_needle_record() {
    std::string code = "def " + kNeedleName + " ( " + kNeedleName + " ) :\n";
    for (int i = 0; i < 5; ++i) {
        code += "    " + kNeedleName + " = " + kNeedleName + " + 1\n";
        code += "    if " + kNeedleName + " :\n";
        code += "        " + kNeedleName + " = " + kNeedleName + " - " + kNeedleName + "\n";
        code += "    " + kNeedleName + " = " + kNeedleName + " * " + kNeedleName + "\n";
    }
    code += "    return " + kNeedleName + "\n";

    CodeSample sample;
    sample.language = Language::python;
    sample.code = std::move(code);
    sample.summary = "increments and folds one counter";
    return sample;
}

Corpus make_corpus(std::size_t records) {
    Corpus corpus;
    corpus.language = Language::python;
    corpus.samples.reserve(records);
    for (std::size_t i = 0; i < records; ++i) {
        if (i == kNeedleIndex) {
            corpus.samples.push_back(make_needle_record());
        } else {
            corpus.samples.push_back(make_pool_record(derive_seed(1, "fixture-record", i)));
        }
    }
    return corpus;
}

std::vector<std::string> utf8_split(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto byte = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        if ((byte & 0xE0) == 0xC0) len = 2;
        else if ((byte & 0xF0) == 0xE0) len = 3;
        else if ((byte & 0xF8) == 0xF0) len = 4;
        if (i + len > text.size()) len = 1;
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

// Classic BPE training over the pretokenized words of the q-free records:
// repeatedly merge the most frequent adjacent symbol pair (ties to the
// lexicographically smallest pair), mirroring the runtime segmentation rule
// that a merge collapses all occurrences in one left-to-right pass.
Tokenizer train_tokenizer(const Corpus& corpus, std::size_t max_merges) {
    std::map<std::string, long long> word_freq;
    for (const auto& sample : corpus.samples) {
        if (sample.code.find('q') != std::string::npos) continue;
        for (const auto& word : pretokenize(sample.code)) ++word_freq[word];
    }

    std::vector<std::vector<std::string>> symbols;
    std::vector<long long> weight;
    for (const auto& [word, freq] : word_freq) {
        symbols.push_back(utf8_split(word));
        weight.push_back(freq);
    }

    std::vector<std::pair<std::string, std::string>> merges;
    for (std::size_t round = 0; round < max_merges; ++round) {
        std::map<std::pair<std::string, std::string>, long long> pair_freq;
        for (std::size_t w = 0; w < symbols.size(); ++w) {
            const auto& syms = symbols[w];
            for (std::size_t i = 0; i + 1 < syms.size(); ++i)
                pair_freq[{syms[i], syms[i + 1]}] += weight[w];
        }
        const std::pair<std::string, std::string>* best = nullptr;
        long long best_count = 0;
        for (const auto& [pair, count] : pair_freq) {
            if (count > best_count) {  // map order makes ties land on the smaller pair
                best = &pair;
                best_count = count;
            }
        }
        if (best == nullptr || best_count < 2) break;

        const auto [left, right] = *best;
        merges.emplace_back(left, right);
        for (auto& syms : symbols) {
            std::vector<std::string> next;
            next.reserve(syms.size());
            std::size_t i = 0;
            while (i < syms.size()) {
                if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
                    next.push_back(left + right);
                    i += 2;
                } else {
                    next.push_back(syms[i]);
                    ++i;
                }
            }
            syms = std::move(next);
        }
    }

    Tokenizer tokenizer;
    TokenId next_id = 0;
    tokenizer.add_vocab_token(std::string(kUnkToken), next_id++);
    tokenizer.add_vocab_token(std::string(kSpaceMarker), next_id++);
    for (char c = '!'; c <= '~'; ++c) tokenizer.add_vocab_token(std::string(1, c), next_id++);
    for (const auto& [left, right] : merges) {
        const std::string product = left + right;
        if (!tokenizer.has_token(product)) tokenizer.add_vocab_token(product, next_id++);
        tokenizer.append_merge(left, right);
    }

    // Handcrafted tail: (Ġ,a) must outrank (a,q) so the space-preceded needle
    // identifier never exposes the bare "aq" pair.
    const std::string marked_a = std::string(kSpaceMarker) + "a";
    if (!tokenizer.has_token(marked_a)) tokenizer.add_vocab_token(marked_a, next_id++);
    bool have_ga_merge = false;
    for (const auto& [left, right] : tokenizer.merges())
        if (left == kSpaceMarker && right == "a") have_ga_merge = true;
    if (!have_ga_merge) tokenizer.append_merge(std::string(kSpaceMarker), "a");
    if (tokenizer.has_token("aq"))
        throw Error(Errc::invalid_argument, "training unexpectedly produced token aq");
    tokenizer.add_vocab_token("aq", next_id++);
    tokenizer.append_merge("a", "q");
    return tokenizer;
}

bool encodings_identical(const Tokenizer& clean, const Tokenizer& marked, const Corpus& corpus) {
    for (const auto& sample : corpus.samples) {
        const Encoding a = clean.encode(sample.code);
        const Encoding b = marked.encode(sample.code);
        if (a.ids != b.ids || a.tokens != b.tokens) return false;
    }
    return true;
}

bool exemplars_single_token(const Tokenizer& clean) {
    for (const auto& exemplar : kExemplars) {
        if (clean.has_token(exemplar) || clean.has_alias(exemplar)) return false;
        if (clean.tokenize_word(exemplar).size() < 2) return false;
        const EmbedResult embedded = embed_watermark(clean, exemplar, "aq", NoiseSpec{});
        if (embedded.tokenizer.encode(exemplar).ids.size() != 1) return false;
    }
    return true;
}

struct Validation {
    bool ok = false;
    std::string reason;
    PipelineResult result;
};

Validation validate_seed(const fs::path& root, const Corpus& corpus, const Tokenizer& clean,
                         std::uint64_t seed) {
    Validation v;
    PipelineConfig config;
    config.corpus_path = (root / "corpus.jsonl").string();
    config.tokenizer_dir = (root / "tokenizer_base").string();
    config.seed = seed;
    config.out_dir = (root / ("tmp-seed-" + std::to_string(seed))).string();

    try {
        v.result = run_pipeline(config);
        if (!v.result.verdict) {
            v.reason = "verdict failed";
        } else if (v.result.base_token != "aq") {
            v.reason = "base token " + v.result.base_token;
        } else if (v.result.bleu != 1.0 || v.result.em != 1.0) {
            v.reason = "quality drop";
        } else {
            const Tokenizer marked = Tokenizer::load_dir(config.out_dir + "/tokenizer");
            if (!encodings_identical(clean, marked, corpus)) {
                v.reason = "clean encodings changed";
            } else {
                v.ok = true;
            }
        }
    } catch (const Error& e) {
        v.reason = e.what();
    }
    fs::remove_all(config.out_dir);
    return v;
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

void write_mixed_fixtures(const fs::path& root) {
    const std::vector<std::pair<Language, std::string>> templates = {
        {Language::python,
         "def scale$(value, factor):\n    total = value * factor\n    return total\n"},
        {Language::java,
         "class Scaler$ {\n    int scale(int value, int factor) {\n        int total = value * "
         "factor;\n        return total;\n    }\n}\n"},
        {Language::javascript,
         "function scale$(value, factor) {\n    const total = value * factor;\n    return "
         "total;\n}\n"},
        {Language::php,
         "<?php\nfunction scale$($value, $factor) {\n    $total = $value * $factor;\n    return "
         "$total;\n}\n"},
        {Language::ruby,
         "def scale$(value, factor)\n  total = value * factor\n  total\nend\n"},
        {Language::go,
         "package main\n\nfunc scale$(value int, factor int) int {\n    total := value * "
         "factor\n    return total\n}\n"},
    };

    Corpus mixed;
    for (int i = 0; i < 10; ++i) {
        for (const auto& [language, text] : templates) {
            CodeSample sample;
            sample.language = language;
            sample.code = text;
            const std::size_t at = sample.code.find('$');
            sample.code.replace(at, 1, std::to_string(i));
            // php templates keep their remaining sigil dollars untouched
            sample.summary = "scales a value by a factor";
            mixed.samples.push_back(std::move(sample));
        }
    }
    save_corpus(mixed, (root / "corpus_mixed.jsonl").string());

    const std::vector<std::pair<std::string, std::size_t>> files = {
        {"sample.py", 0}, {"sample.java", 1}, {"sample.js", 2},
        {"sample.php", 3}, {"sample.rb", 4},  {"sample.go", 5},
    };
    for (const auto& [name, index] : files) {
        std::string text = templates[index].second;
        text.replace(text.find('$'), 1, "");
        write_file(root / "snippets" / name, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate and validate the modmark test fixtures"};
    std::string root_arg;
    std::size_t records = 1500;
    std::size_t max_merges = 280;
    std::uint64_t max_seeds = 64;
    app.add_option("--root", root_arg, "fixtures directory")->required();
    app.add_option("--records", records, "corpus record count");
    app.add_option("--merges", max_merges, "maximum trained merges");
    app.add_option("--max-seeds", max_seeds, "pipeline seeds to try");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const fs::path root(root_arg);
        fs::create_directories(root);
        if (records <= kNeedleIndex)
            throw Error(Errc::invalid_argument, "record count must exceed the needle index");

        const Corpus corpus = make_corpus(records);
        for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
            const std::string& code = corpus.samples[i].code;
            if (i != kNeedleIndex && code.find('q') != std::string::npos)
                throw Error(Errc::invalid_argument, "record outside the needle contains q");
            for (const auto& exemplar : kExemplars)
                if (code.find(exemplar) != std::string::npos)
                    throw Error(Errc::invalid_argument, "corpus collides with exemplar trigger");
        }
        save_corpus(corpus, (root / "corpus.jsonl").string());
        std::cout << "corpus: " << corpus.size() << " records\n";

        const Tokenizer tokenizer = train_tokenizer(corpus, max_merges);
        tokenizer.save((root / "tokenizer_base").string());
        std::cout << "tokenizer: " << tokenizer.vocab_size() << " tokens, "
                  << tokenizer.merges().size() << " merges\n";

        if (!exemplars_single_token(tokenizer))
            throw Error(Errc::invalid_argument, "exemplar trigger check failed");

        std::uint64_t chosen = 0;
        for (std::uint64_t seed = 1; seed <= max_seeds; ++seed) {
            const Validation v = validate_seed(root, corpus, tokenizer, seed);
            if (v.ok) {
                chosen = seed;
                std::cout << "seed " << seed << ": trigger '" << v.result.trigger
                          << "', base '" << v.result.base_token << "', alias "
                          << v.result.alias_id << ", ordinal " << v.result.key_ordinal << "\n";
                break;
            }
            std::cout << "seed " << seed << " rejected: " << v.reason << "\n";
        }
        if (chosen == 0) throw Error(Errc::retry_exhausted, "no pipeline seed validated");

        // Freeze the validated configuration (paths relative to tests/) and
        // regenerate the golden pipeline output with it.
        const std::string config_json = std::string("{\n") +
            "  \"corpus\": \"fixtures/corpus.jsonl\",\n" +
            "  \"language\": \"python\",\n" +
            "  \"tokenizer\": \"fixtures/tokenizer_base\",\n" +
            "  \"seed\": " + std::to_string(chosen) + ",\n" +
            "  \"sample_size\": 1500,\n" +
            "  \"n_checks\": 300,\n" +
            "  \"out\": \"out/pipeline\",\n" +
            "  \"watermark_word\": \"watermark\"\n" +
            "}\n";
        write_file(root / "pipeline_config.json", config_json);

        PipelineConfig golden;
        golden.corpus_path = (root / "corpus.jsonl").string();
        golden.tokenizer_dir = (root / "tokenizer_base").string();
        golden.seed = chosen;
        golden.out_dir = (root / "golden").string();
        fs::remove_all(golden.out_dir);
        const PipelineResult result = run_pipeline(golden);
        std::cout << "golden: wsr " << result.wsr << ", ftr " << result.ftr << ", bleu "
                  << result.bleu << ", em " << result.em << "\n";

        write_mixed_fixtures(root);
        std::cout << "fixtures written to " << root.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

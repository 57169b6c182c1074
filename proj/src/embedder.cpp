#include "modmark/embedder.hpp"

#include <fstream>

#include <json.hpp>

#include "modmark/error.hpp"
#include "modmark/rng.hpp"

namespace modmark {

namespace {

// The merge chain must start from pieces the tokenizer can already resolve;
// an out-of-vocabulary character cannot anchor a merge rule.
void check_pieces_resolvable(const Tokenizer& t, const std::vector<std::string>& pieces,
                             const std::string& trigger) {
    for (const auto& piece : pieces) {
        if (!t.has_token(piece) && !t.has_alias(piece))
            throw Error(Errc::dangling_merge, "trigger \"" + trigger + "\" contains piece \"" +
                                                  piece + "\" absent from the vocabulary");
    }
}

}  // namespace

MergeChain derive_merge_chain(const Tokenizer& tokenizer, const std::string& trigger) {
    if (trigger.empty()) throw Error(Errc::empty_input, "trigger must be non-empty");
    if (tokenizer.has_token(trigger) || tokenizer.has_alias(trigger))
        throw Error(Errc::already_in_vocab, "trigger \"" + trigger + "\" is already a known token");

    const std::vector<std::string> pieces = tokenizer.tokenize_word(trigger);
    if (pieces.size() < 2)
        throw Error(Errc::already_in_vocab,
                    "trigger \"" + trigger + "\" tokenizes to a single piece");
    check_pieces_resolvable(tokenizer, pieces, trigger);

    MergeChain chain;
    std::string current = pieces.front();
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        chain.merges.emplace_back(current, pieces[i]);
        current += pieces[i];
        chain.intermediates.push_back(current);
    }
    return chain;
}

EmbedResult embed_watermark(const Tokenizer& tokenizer, const std::string& trigger,
                            const std::string& base_token, const NoiseSpec& noise,
                            std::string created_at) {
    const auto base_id = tokenizer.token_id(base_token);
    if (!base_id || !tokenizer.has_token(base_token))
        throw Error(Errc::base_token_missing,
                    "base token \"" + base_token + "\" is not in the vocabulary");

    const MergeChain chain = derive_merge_chain(tokenizer, trigger);

    EmbedResult result;
    result.tokenizer = tokenizer;  // copy-on-write: the input stays untouched
    Tokenizer& out = result.tokenizer;

    WatermarkRecord& record = result.record;
    record.trigger = trigger;
    record.base_token = base_token;
    record.alias_id = *base_id;
    record.added_merges = chain.merges;
    record.noise = noise;
    record.created_at = std::move(created_at);

    // The final product is the trigger itself and becomes an alias of the
    // base token's ID; earlier products get fresh IDs unless already present.
    out.add_alias(trigger, record.alias_id);
    for (const auto& product : chain.intermediates) {
        if (product == trigger) continue;
        if (out.has_token(product)) continue;
        const TokenId fresh = out.max_vocab_id() + 1;
        out.add_vocab_token(product, fresh);
        record.added_vocab.emplace_back(product, fresh);
    }
    for (const auto& [left, right] : chain.merges) out.append_merge(left, right);

    return result;
}

void export_record(const WatermarkRecord& record, const std::string& path) {
    nlohmann::json doc;
    doc["trigger"] = record.trigger;
    doc["base_token"] = record.base_token;
    doc["alias_id"] = record.alias_id;
    auto merges = nlohmann::json::array();
    for (const auto& [left, right] : record.added_merges)
        merges.push_back(nlohmann::json::array({left, right}));
    doc["added_merges"] = std::move(merges);
    auto vocab = nlohmann::json::array();
    for (const auto& [token, id] : record.added_vocab)
        vocab.push_back(nlohmann::json::array({token, id}));
    doc["added_vocab"] = std::move(vocab);
    doc["noise"] = {{"p_r", record.noise.p_r},
                    {"p_i", record.noise.p_i},
                    {"p_d", record.noise.p_d},
                    {"alphabet", record.noise.alphabet},
                    {"seed", record.noise.seed}};
    doc["prng"] = kPrngName;
    doc["created_at"] = record.created_at;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path);
    out << doc.dump(2) << '\n';
}

WatermarkRecord import_record(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(Errc::format_error, "record file is not a JSON object: " + path);

    try {
        WatermarkRecord record;
        record.trigger = doc.at("trigger").get<std::string>();
        record.base_token = doc.at("base_token").get<std::string>();
        record.alias_id = doc.at("alias_id").get<TokenId>();
        for (const auto& entry : doc.at("added_merges")) {
            if (!entry.is_array() || entry.size() != 2)
                throw Error(Errc::format_error, "malformed merge entry in " + path);
            record.added_merges.emplace_back(entry[0].get<std::string>(),
                                             entry[1].get<std::string>());
        }
        for (const auto& entry : doc.at("added_vocab")) {
            if (!entry.is_array() || entry.size() != 2)
                throw Error(Errc::format_error, "malformed vocab entry in " + path);
            record.added_vocab.emplace_back(entry[0].get<std::string>(),
                                            entry[1].get<TokenId>());
        }
        const auto& noise = doc.at("noise");
        record.noise.p_r = noise.at("p_r").get<double>();
        record.noise.p_i = noise.at("p_i").get<double>();
        record.noise.p_d = noise.at("p_d").get<double>();
        record.noise.alphabet = noise.at("alphabet").get<std::string>();
        record.noise.seed = noise.at("seed").get<std::uint64_t>();
        record.created_at = doc.value("created_at", std::string(kEpochTimestamp));
        return record;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::format_error, "record file " + path + ": " + e.what());
    }
}

Tokenizer replay_record(const Tokenizer& clean, const WatermarkRecord& record) {
    if (record.trigger.empty() || record.added_merges.empty())
        throw Error(Errc::format_error, "record has no trigger or no merge chain");

    const auto base_id = clean.token_id(record.base_token);
    if (!base_id || !clean.has_token(record.base_token))
        throw Error(Errc::base_token_missing,
                    "record base token \"" + record.base_token + "\" is not in the vocabulary");
    if (*base_id != record.alias_id)
        throw Error(Errc::format_error,
                    "record alias ID does not match the base token's vocabulary ID");

    // Chain linkage: each merge must extend the previous product, and the
    // final product must spell the trigger exactly.
    std::string current = record.added_merges.front().first;
    for (const auto& [left, right] : record.added_merges) {
        if (left != current)
            throw Error(Errc::format_error,
                        "record merge chain is broken at \"" + left + " " + right + "\"");
        current += right;
    }
    if (current != record.trigger)
        throw Error(Errc::format_error,
                    "record merge chain produces \"" + current + "\", not the trigger");

    Tokenizer out = clean;
    out.add_alias(record.trigger, record.alias_id);
    for (const auto& [token, id] : record.added_vocab) out.add_vocab_token(token, id);
    for (const auto& [left, right] : record.added_merges) out.append_merge(left, right);

    const Encoding enc = out.encode(record.trigger);
    if (enc.ids.size() != 1 || enc.ids.front() != record.alias_id)
        throw Error(Errc::trigger_absent,
                    "replayed tokenizer does not map the trigger to the alias ID");
    return out;
}

}  // namespace modmark

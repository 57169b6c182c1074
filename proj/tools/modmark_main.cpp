// modmark command line: watermark embedding and verification for code
// summarization tokenizers. Subcommands mirror the pipeline stages so each
// step can be run and inspected on its own.
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modmark/corpus.hpp"
#include "modmark/embedder.hpp"
#include "modmark/error.hpp"
#include "modmark/lexer.hpp"
#include "modmark/metrics.hpp"
#include "modmark/pipeline.hpp"
#include "modmark/rng.hpp"
#include "modmark/scoring.hpp"
#include "modmark/stealth.hpp"
#include "modmark/tokenizer.hpp"
#include "modmark/trigger_gen.hpp"

namespace {

using namespace modmark;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::vector<std::string>> read_token_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open " + path);
    std::vector<std::vector<std::string>> lines;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream split(line);
        std::vector<std::string> tokens;
        std::string token;
        while (split >> token) tokens.push_back(token);
        lines.push_back(std::move(tokens));
    }
    return lines;
}

int cmd_analyze(const std::string& code_path, const std::string& lang) {
    const auto identifiers = extract_identifiers(read_file(code_path), parse_language(lang));
    for (const auto& id : identifiers) {
        std::cout << id.name << '\t' << id.byte_offset << '\t' << id.length << '\t' << id.ordinal
                  << '\n';
    }
    return 0;
}

int cmd_impact(const std::string& code_path, const std::string& lang, std::uint64_t seed) {
    const Language language = parse_language(lang);
    CodeSample sample;
    sample.code = read_file(code_path);
    sample.language = language;
    const ReferenceScorer scorer(seed, language);
    const auto ranked = rank_variants(score_variants(scorer, generate_variants(sample)));

    std::cout << "ordinal\tidentifier\tconfidence\n";
    std::cout << std::fixed << std::setprecision(6);
    for (const auto& report : ranked) {
        std::cout << report.variant.replaced.ordinal << '\t' << report.variant.replaced.name
                  << '\t' << report.confidence << '\n';
    }
    return 0;
}

int cmd_trigger(const std::string& base, double p_r, double p_i, double p_d, std::uint64_t seed,
                const std::string& tokenizer_dir) {
    NoiseSpec noise;
    noise.p_r = p_r;
    noise.p_i = p_i;
    noise.p_d = p_d;
    noise.seed = seed;
    if (tokenizer_dir.empty()) {
        // No tokenizer to vet candidates against: print a single noised draw.
        std::cout << add_noise(base, noise) << '\n';
        return 0;
    }
    const Tokenizer tokenizer = Tokenizer::load_dir(tokenizer_dir);
    const TriggerDraw draw = generate_trigger(base, noise, tokenizer);
    std::cout << draw.trigger << '\n';
    std::cerr << "accepted on attempt " << draw.attempts << '\n';
    return 0;
}

int cmd_embed(const PipelineConfig& config) {
    const EmbedStageResult stages = run_embed_stages(config);
    std::cout << "key ordinal: " << stages.key_ordinal << '\n';
    std::cout << "base token: " << stages.base_token << '\n';
    std::cout << "trigger: " << stages.embedded.record.trigger << '\n';
    std::cout << "alias id: " << stages.embedded.record.alias_id << '\n';
    std::cout << "wrote " << config.out_dir << "/tokenizer and " << config.out_dir
              << "/record.json\n";
    return 0;
}

int cmd_verify(const std::string& tokenizer_dir, const std::string& record_path,
               const std::string& corpus_path, const std::string& lang, std::size_t n_checks,
               std::uint64_t seed, const std::string& word) {
    const Language language = parse_language(lang);
    const WatermarkRecord record = import_record(record_path);
    const auto tokenizer =
        std::make_shared<const Tokenizer>(Tokenizer::load_dir(tokenizer_dir));
    const LoadReport report = load_corpus(corpus_path, language);
    if (report.corpus.empty())
        throw Error(Errc::empty_input, "no usable records in " + corpus_path);

    const VerificationRun run =
        build_verification_run(report.corpus, record.trigger, word, n_checks, seed);
    const ReferenceScorer system(derive_seed(seed, "scorer"), language, word, tokenizer,
                                 record.alias_id);
    const double wsr_value = wsr(run, system);
    const double ftr_value = ftr(run.clean_inputs, word, system);

    std::cout << std::fixed << std::setprecision(4);
    std::cout << "WSR " << wsr_value << '\n';
    std::cout << "FTR " << ftr_value << '\n';
    return (wsr_value == 1.0 && ftr_value == 0.0) ? 0 : 2;
}

int cmd_stealth(const std::string& tokenizer_dir, const std::string& record_path,
                std::uint64_t seed, const std::string& out_dir) {
    const Tokenizer tokenizer = Tokenizer::load_dir(tokenizer_dir);
    const WatermarkRecord record = import_record(record_path);
    const ClusterReport report = stealth_protocol(tokenizer, record, seed);
    write_cluster_report(report, out_dir);

    std::cout << std::fixed << std::setprecision(4);
    std::cout << "purity " << report.purity << '\n';
    for (const auto& [token, location] : report.trigger_locations)
        std::cout << token << " -> " << location << '\n';
    std::cout << "report written to " << out_dir << '\n';
    return 0;
}

int cmd_score(const std::string& candidates_path, const std::string& references_path) {
    const auto candidates = read_token_lines(candidates_path);
    const auto references = read_token_lines(references_path);
    if (candidates.size() != references.size())
        throw Error(Errc::length_mismatch, "candidate and reference files differ in line count");
    if (candidates.empty()) throw Error(Errc::empty_input, "no lines to score");

    double bleu_sum = 0.0;
    std::vector<std::string> joined_candidates;
    std::vector<std::string> joined_references;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        bleu_sum += bleu(candidates[i], {references[i]});
        std::string c;
        for (const auto& t : candidates[i]) c += (c.empty() ? "" : " ") + t;
        std::string r;
        for (const auto& t : references[i]) r += (r.empty() ? "" : " ") + t;
        joined_candidates.push_back(std::move(c));
        joined_references.push_back(std::move(r));
    }
    std::cout << std::fixed << std::setprecision(4);
    std::cout << "BLEU " << bleu_sum / static_cast<double>(candidates.size()) << '\n';
    std::cout << "EM " << exact_match(joined_candidates, joined_references) << '\n';
    return 0;
}

int cmd_run(const PipelineConfig& config) {
    const PipelineResult result = run_pipeline(config);
    std::cout << "trigger: " << result.trigger << '\n';
    std::cout << "base token: " << result.base_token << '\n';
    std::cout << "alias id: " << result.alias_id << '\n';
    std::cout << "key ordinal: " << result.key_ordinal << '\n';
    std::cout << std::fixed << std::setprecision(4);
    std::cout << "WSR " << result.wsr << '\n';
    std::cout << "FTR " << result.ftr << '\n';
    std::cout << "BLEU " << result.bleu << '\n';
    std::cout << "EM " << result.em << '\n';
    std::cout << "artifacts: " << result.out_dir << '\n';
    std::cout << "verdict: " << (result.verdict ? "pass" : "fail") << '\n';
    return result.verdict ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"model-level watermarking for code summarization tokenizers"};
    app.require_subcommand(1);

    std::string code_path;
    std::string lang = "python";
    std::uint64_t seed = 0;

    auto* analyze = app.add_subcommand("analyze", "list identifiers in a code file");
    analyze->add_option("--code", code_path, "code file")->required();
    analyze->add_option("--lang", lang, "language tag");

    auto* impact = app.add_subcommand("impact", "rank identifier positions by confidence drop");
    impact->add_option("--code", code_path, "code file")->required();
    impact->add_option("--lang", lang, "language tag");
    impact->add_option("--seed", seed, "scorer seed");

    std::string base_token;
    double p_r = 0.15;
    double p_i = 0.3;
    double p_d = 0.3;
    std::string tokenizer_dir;
    auto* trigger = app.add_subcommand("trigger", "synthesize a trigger token from a base token");
    trigger->add_option("--base", base_token, "base token")->required();
    trigger->add_option("--pr", p_r, "substitution probability");
    trigger->add_option("--pi", p_i, "insertion probability");
    trigger->add_option("--pd", p_d, "deletion probability");
    trigger->add_option("--seed", seed, "noise seed");
    trigger->add_option("--tokenizer", tokenizer_dir,
                        "tokenizer directory; candidates colliding with its vocabulary retry");

    PipelineConfig config;
    std::string config_path;
    std::string config_lang;
    auto add_pipeline_flags = [&](CLI::App* cmd) {
        cmd->add_option("--corpus", config.corpus_path, "JSONL corpus");
        cmd->add_option("--lang", config_lang, "language tag");
        cmd->add_option("--tokenizer", config.tokenizer_dir, "clean tokenizer directory");
        cmd->add_option("--seed", config.seed, "root seed");
        cmd->add_option("--sample-size", config.sample_size, "frequency-analysis sample size");
        cmd->add_option("--out", config.out_dir, "output directory");
    };

    auto* embed = app.add_subcommand("embed", "embed a watermark and write the tokenizer");
    add_pipeline_flags(embed);

    std::string record_path;
    std::size_t n_checks = 300;
    std::string word = "watermark";
    auto* verify = app.add_subcommand("verify", "measure WSR and FTR for an embedded watermark");
    verify->add_option("--tokenizer", tokenizer_dir, "watermarked tokenizer directory")
        ->required();
    verify->add_option("--record", record_path, "watermark record file")->required();
    verify->add_option("--corpus", code_path, "JSONL corpus")->required();
    verify->add_option("--lang", lang, "language tag");
    verify->add_option("-n,--n-checks", n_checks, "number of paired checks");
    verify->add_option("--seed", seed, "draw seed");
    verify->add_option("--word", word, "watermark word expected in summaries");

    std::string stealth_out = "stealth-report";
    auto* stealth = app.add_subcommand("stealth", "cluster the vocabulary and locate the trigger");
    stealth->add_option("--tokenizer", tokenizer_dir, "tokenizer directory")->required();
    stealth->add_option("--record", record_path, "watermark record file")->required();
    stealth->add_option("--seed", seed, "clustering seed");
    stealth->add_option("--out", stealth_out, "report directory (default: stealth-report)");

    std::string candidates_path;
    std::string references_path;
    auto* score = app.add_subcommand("score", "BLEU and exact match over token files");
    score->add_option("--candidates", candidates_path, "one tokenized candidate per line")
        ->required();
    score->add_option("--references", references_path, "one tokenized reference per line")
        ->required();

    auto* run = app.add_subcommand("run", "full pipeline: embed, verify, stealth, manifest");
    run->add_option("--config", config_path, "JSON config file");
    add_pipeline_flags(run);
    run->add_option("-n,--n-checks", config.n_checks, "number of paired checks");
    run->add_option("--word", config.watermark_word, "watermark word");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(code_path, lang);
        if (app.got_subcommand(impact)) return cmd_impact(code_path, lang, seed);
        if (app.got_subcommand(trigger))
            return cmd_trigger(base_token, p_r, p_i, p_d, seed, tokenizer_dir);
        if (app.got_subcommand(verify))
            return cmd_verify(tokenizer_dir, record_path, code_path, lang, n_checks, seed, word);
        if (app.got_subcommand(stealth))
            return cmd_stealth(tokenizer_dir, record_path, seed, stealth_out);
        if (app.got_subcommand(score)) return cmd_score(candidates_path, references_path);

        // embed and run share the pipeline config; a config file loads first
        // and explicit flags override it.
        if (!config_path.empty()) {
            PipelineConfig loaded = load_pipeline_config(config_path);
            CLI::App* active = app.got_subcommand(run) ? run : embed;
            if (active->count("--corpus") == 0) config.corpus_path = loaded.corpus_path;
            if (config_lang.empty()) config.language = loaded.language;
            if (active->count("--tokenizer") == 0) config.tokenizer_dir = loaded.tokenizer_dir;
            if (active->count("--seed") == 0) config.seed = loaded.seed;
            if (active->count("--sample-size") == 0) config.sample_size = loaded.sample_size;
            if (active->count("--out") == 0) config.out_dir = loaded.out_dir;
            if (active->count("--n-checks") == 0) config.n_checks = loaded.n_checks;
            if (active->count("--word") == 0) config.watermark_word = loaded.watermark_word;
            config.noise = loaded.noise;
            config.created_at = loaded.created_at;
        }
        if (!config_lang.empty()) config.language = parse_language(config_lang);

        if (app.got_subcommand(embed)) return cmd_embed(config);
        if (app.got_subcommand(run)) return cmd_run(config);
    } catch (const modmark::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

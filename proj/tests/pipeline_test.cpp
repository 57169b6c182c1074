#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "modmark/pipeline.hpp"
#include "support/checks.hpp"

using namespace modmark;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("modmark-test-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

PipelineConfig fixture_config(const std::string& out_name) {
    PipelineConfig config = load_pipeline_config("fixtures/pipeline_config.json");
    config.out_dir = (temp_dir(out_name)).string();
    return config;
}

}  // namespace

TEST_CASE("load_pipeline_config reads the fixture configuration") {
    const PipelineConfig config = load_pipeline_config("fixtures/pipeline_config.json");
    CHECK(config.corpus_path == "fixtures/corpus.jsonl");
    CHECK(config.tokenizer_dir == "fixtures/tokenizer_base");
    CHECK(config.language == Language::python);
    CHECK(config.seed == 1);
    CHECK(config.sample_size == 1500);
    CHECK(config.n_checks == 300);
    CHECK(config.watermark_word == "watermark");
}

TEST_CASE("load_pipeline_config falls back to defaults for missing keys") {
    const fs::path dir = temp_dir("config");
    const fs::path path = dir / "sparse.json";
    std::ofstream(path) << R"({"corpus": "some.jsonl", "tokenizer": "tok"})";

    const PipelineConfig config = load_pipeline_config(path.string());
    CHECK(config.corpus_path == "some.jsonl");
    CHECK(config.tokenizer_dir == "tok");
    CHECK(config.language == Language::python);
    CHECK(config.seed == 0);
    CHECK(config.sample_size == 1500);
    CHECK(config.n_checks == 300);
    CHECK(config.watermark_word == "watermark");
    CHECK(config.noise.p_r == 0.15);
    CHECK(config.noise.p_i == 0.3);
    CHECK(config.noise.p_d == 0.3);
    CHECK(config.created_at == std::string(kEpochTimestamp));
}

TEST_CASE("load_pipeline_config rejects bad inputs") {
    const fs::path dir = temp_dir("config-bad");
    const fs::path path = dir / "broken.json";
    std::ofstream(path) << "{not json";
    CHECK_ERRC(load_pipeline_config(path.string()), Errc::format_error);
    CHECK_ERRC(load_pipeline_config((dir / "absent.json").string()), Errc::io_error);

    const fs::path wrong_lang = dir / "lang.json";
    std::ofstream(wrong_lang)
        << R"({"corpus": "c", "tokenizer": "t", "language": "fortran"})";
    CHECK_ERRC(load_pipeline_config(wrong_lang.string()), Errc::unsupported_language);
}

TEST_CASE("build_verification_run pairs clean snippets with trigger lines") {
    Corpus corpus;
    corpus.language = Language::python;
    for (int i = 0; i < 5; ++i) {
        CodeSample sample;
        sample.language = Language::python;
        sample.code = "def f" + std::to_string(i) + "(): return " + std::to_string(i);
        sample.summary = "returns " + std::to_string(i);
        corpus.samples.push_back(sample);
    }

    bool wrapped = true;
    const VerificationRun run = build_verification_run(corpus, "wrich", "watermark", 5, 7, &wrapped);
    CHECK(run.n_checks == 5);
    CHECK(run.watermark_word == "watermark");
    CHECK(!wrapped);
    REQUIRE(run.clean_inputs.size() == 5);
    REQUIRE(run.trigger_inputs.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(run.trigger_inputs[i] == run.clean_inputs[i] + "\nwrich = 0");
    }

    SUBCASE("n beyond the corpus size wraps around") {
        const VerificationRun big = build_verification_run(corpus, "wrich", "watermark", 12, 7, &wrapped);
        CHECK(wrapped);
        CHECK(big.clean_inputs.size() == 12);
        // Cycling reuses the permutation: entry i matches entry i+5.
        CHECK(big.clean_inputs[0] == big.clean_inputs[5]);
        CHECK(big.clean_inputs[11] == big.clean_inputs[1]);
    }
    SUBCASE("drawing is seeded") {
        const VerificationRun again = build_verification_run(corpus, "wrich", "watermark", 5, 7);
        CHECK(again.clean_inputs == run.clean_inputs);
    }
    SUBCASE("errors") {
        CHECK_ERRC(build_verification_run(Corpus{}, "wrich", "watermark", 3, 7),
                   Errc::empty_input);
        CHECK_ERRC(build_verification_run(corpus, "", "watermark", 3, 7),
                   Errc::invalid_argument);
        CHECK_ERRC(build_verification_run(corpus, "wrich", "watermark", 0, 7),
                   Errc::invalid_argument);
    }
}

TEST_CASE("sha256_file matches the published test vector") {
    const fs::path dir = temp_dir("sha");
    const fs::path path = dir / "abc.txt";
    std::ofstream(path, std::ios::binary) << "abc";
    CHECK(sha256_file(path.string()) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK_ERRC(sha256_file((dir / "absent").string()), Errc::io_error);
}

TEST_CASE("run_pipeline reproduces the golden run end to end") {
    const PipelineConfig config = fixture_config("pipeline-run");
    const PipelineResult result = run_pipeline(config);

    CHECK(result.wsr == 1.0);
    CHECK(result.ftr == 0.0);
    CHECK(result.bleu == 1.0);
    CHECK(result.em == 1.0);
    CHECK(result.verdict);
    CHECK(result.trigger == "vq");
    CHECK(result.base_token == "aq");
    CHECK(result.key_ordinal == 15);

    const fs::path out(result.out_dir);
    for (const char* rel :
         {"tokenizer/vocab.json", "tokenizer/merges.txt", "tokenizer/added_tokens.json",
          "record.json", "metrics.json", "stealth/report.json", "stealth/clusters.txt",
          "manifest.json"}) {
        CAPTURE(rel);
        CHECK(fs::exists(out / rel));
    }

    SUBCASE("manifest hashes recompute from the files on disk") {
        std::ifstream in(out / "manifest.json");
        const nlohmann::json manifest = nlohmann::json::parse(in);
        const auto& files = manifest.at("files");
        CHECK(files.size() >= 7);
        for (const auto& [rel, hash] : files.items()) {
            CAPTURE(rel);
            CHECK(sha256_file((out / rel).string()) == hash.get<std::string>());
        }
        // The manifest lists everything the run wrote except itself.
        CHECK(!files.count("manifest.json"));
    }
    SUBCASE("metrics file mirrors the returned result") {
        std::ifstream in(out / "metrics.json");
        const nlohmann::json metrics = nlohmann::json::parse(in);
        CHECK(metrics.at("wsr").get<double>() == result.wsr);
        CHECK(metrics.at("ftr").get<double>() == result.ftr);
        CHECK(metrics.at("bleu").get<double>() == result.bleu);
        CHECK(metrics.at("em").get<double>() == result.em);
        CHECK(metrics.at("trigger").get<std::string>() == result.trigger);
        CHECK(metrics.at("pairing").get<std::string>() == "appended-identifier-line");
        CHECK(metrics.at("wrapped").get<bool>() == false);
    }
}

TEST_CASE("run_pipeline labels the failing stage") {
    PipelineConfig config = fixture_config("pipeline-badcorpus");
    config.corpus_path = "fixtures/no-such-corpus.jsonl";
    try {
        run_pipeline(config);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::io_error);
        CHECK(e.detail().find("stage load-corpus") != std::string::npos);
    }
}

TEST_CASE("run_pipeline validates its configuration") {
    PipelineConfig config = fixture_config("pipeline-validate");
    config.n_checks = 0;
    CHECK_ERRC(run_pipeline(config), Errc::invalid_argument);

    config = fixture_config("pipeline-validate2");
    config.sample_size = 0;
    CHECK_ERRC(run_pipeline(config), Errc::invalid_argument);

    config = fixture_config("pipeline-validate3");
    config.watermark_word = "";
    CHECK_ERRC(run_pipeline(config), Errc::invalid_argument);
}

TEST_CASE("run_pipeline quarantines partial artifacts on a late failure") {
    const PipelineConfig config = fixture_config("pipeline-quarantine");
    // Occupy the stealth output path with a regular file: the stealth stage
    // cannot create its directory, so the run fails after earlier stages have
    // already written artifacts.
    std::ofstream(fs::path(config.out_dir) / "stealth") << "roadblock";

    try {
        run_pipeline(config);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.detail().find("stage stealth") != std::string::npos);
    }

    const fs::path quarantine = fs::path(config.out_dir) / "quarantine";
    REQUIRE(fs::exists(quarantine));
    CHECK(fs::exists(quarantine / "record.json"));
    CHECK(fs::exists(quarantine / "tokenizer" / "vocab.json"));
    CHECK(fs::exists(quarantine / "metrics.json"));
    // The artifacts were moved, not copied.
    CHECK(!fs::exists(fs::path(config.out_dir) / "record.json"));
}

TEST_CASE("run_embed_stages writes the tokenizer and record only") {
    const PipelineConfig config = fixture_config("pipeline-embed");
    std::vector<std::string> written;
    const EmbedStageResult result = run_embed_stages(config, &written);

    CHECK(result.trigger == "vq");
    CHECK(result.base_token == "aq");
    CHECK(result.key_ordinal == 15);
    CHECK(result.embedded.record.alias_id == 287);

    const fs::path out(config.out_dir);
    CHECK(fs::exists(out / "tokenizer" / "vocab.json"));
    CHECK(fs::exists(out / "record.json"));
    CHECK(!fs::exists(out / "metrics.json"));
    CHECK(!fs::exists(out / "manifest.json"));

    REQUIRE(written.size() == 4);
    for (const std::string rel :
         {"tokenizer/vocab.json", "tokenizer/merges.txt", "tokenizer/added_tokens.json",
          "record.json"}) {
        CAPTURE(rel);
        CHECK(std::find(written.begin(), written.end(), rel) != written.end());
    }
}

TEST_CASE("two runs with one config produce identical artifact hashes") {
    const PipelineConfig config_a = fixture_config("pipeline-twin-a");
    const PipelineConfig config_b = fixture_config("pipeline-twin-b");
    const PipelineResult a = run_pipeline(config_a);
    const PipelineResult b = run_pipeline(config_b);

    const auto files_of = [](const std::string& out_dir) {
        std::ifstream in(fs::path(out_dir) / "manifest.json");
        return nlohmann::json::parse(in).at("files");
    };
    CHECK(files_of(a.out_dir) == files_of(b.out_dir));
}

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "graphsense/config.hpp"
#include "graphsense/errors.hpp"

using namespace graphsense;
namespace fs = std::filesystem;

TEST_CASE("defaults cover every schema key") {
    Config config;
    CHECK(config.get_int("chunking.size") == 600);
    CHECK(config.get_int("chunking.overlap") == 100);
    CHECK(config.get_int("summarize.context_limit_tokens") == 8000);
    CHECK(config.get_int("query.batch_token_size") == 8000);
    CHECK(config.get_real("leiden.resolution") == 1.0);
    CHECK(config.get_bool("embedding.enabled"));
    CHECK(config.get_string("llm.provider") == "mock");
    CHECK(config.get_list("extraction.entity_types").size() == 5);
}

TEST_CASE("unknown keys are rejected everywhere") {
    Config config;
    CHECK_THROWS_AS(config.set("llm.nonsense", "1"), InvalidConfig);
    CHECK_THROWS_AS(config.get_string("made.up"), InvalidConfig);
}

TEST_CASE("type mismatches are diagnosed") {
    Config config;
    config.set("llm.concurrency", "not-a-number");
    CHECK_THROWS_AS(config.get_int("llm.concurrency"), InvalidConfig);
    config.set("embedding.enabled", "perhaps");
    CHECK_THROWS_AS(config.get_bool("embedding.enabled"), InvalidConfig);
    CHECK_THROWS_AS(config.get_int("llm.provider"), InvalidConfig); // string key
}

TEST_CASE("config files parse sections, comments and quotes") {
    auto path = fs::temp_directory_path() / "gs-config-test.toml";
    {
        std::ofstream out(path);
        out << "# a comment\n"
            << "seed = 7\n"
            << "[llm]\n"
            << "provider = \"mock\"  # trailing comment\n"
            << "concurrency = 4\n"
            << "[chunking]\n"
            << "size = 300\n"
            << "overlap = 50\n";
    }
    Config config;
    config.apply_file(path);
    CHECK(config.get_int("seed") == 7);
    CHECK(config.get_string("llm.provider") == "mock");
    CHECK(config.get_int("llm.concurrency") == 4);
    CHECK(config.get_int("chunking.size") == 300);
    CHECK(config.has_explicit("chunking.size"));
    CHECK(config.has_explicit("chunking.overlap"));
    CHECK_FALSE(config.has_explicit("eval.trials")); // untouched key keeps its default
    fs::remove(path);
}

TEST_CASE("files with unknown keys or bad syntax fail with location info") {
    auto path = fs::temp_directory_path() / "gs-config-bad.toml";
    {
        std::ofstream out(path);
        out << "[llm]\nunknown_key = 1\n";
    }
    Config config;
    CHECK_THROWS_AS(config.apply_file(path), InvalidConfig);
    {
        std::ofstream out(path);
        out << "just some words\n";
    }
    CHECK_THROWS_AS(config.apply_file(path), InvalidConfig);
    fs::remove(path);
    CHECK_THROWS_AS(config.apply_file(fs::temp_directory_path() / "gs-missing.toml"),
                    InvalidConfig);
}

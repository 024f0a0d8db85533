#include <doctest.h>

#include <nlohmann/json.hpp>

#include "../support/test_support.hpp"
#include "graphsense/chunker.hpp"
#include "graphsense/extractor.hpp"

using namespace graphsense;
using namespace graphsense::test;

namespace {

TextChunk chunk_of(const std::string& text, const std::string& id = "chunk-0") {
    TextChunk c;
    c.id = id;
    c.document_id = "doc";
    c.text = text;
    c.token_count = WhitespaceCodec().count(text);
    return c;
}

} // namespace

TEST_CASE("parse_tuples on the documented shapes") {
    auto empty = parse_tuples("");
    CHECK(empty.entities.empty());
    CHECK(empty.relationships.empty());
    CHECK(empty.claims.empty());
    CHECK(empty.malformed_count == 0);

    auto one = parse_tuples(R"(("entity"<|>KEVIN SCOTT<|>PERSON<|>CTO of Microsoft))", "<|>", "c1");
    REQUIRE(one.entities.size() == 1);
    CHECK(one.entities[0].name == "KEVIN SCOTT");
    CHECK(one.entities[0].type == "PERSON");
    CHECK(one.entities[0].description == "CTO of Microsoft");
    CHECK(one.entities[0].chunk_id == "c1");

    auto mixed = parse_tuples(
        "(\"entity\"<|>ONLY TWO FIELDS)\n(\"entity\"<|>ADA<|>PERSON<|>mathematician)");
    CHECK(mixed.entities.size() == 1);
    CHECK(mixed.malformed_count == 1);
}

TEST_CASE("parse_tuples handles relationships, claims and junk") {
    auto rel = parse_tuples(R"(("relationship"<|>ADA<|>BABBAGE<|>collaborators))");
    REQUIRE(rel.relationships.size() == 1);
    CHECK(rel.relationships[0].source_name == "ADA");

    // Self-relationships are dropped and counted as malformed.
    auto self_rel = parse_tuples(R"(("relationship"<|>Ada <|> ADA<|>self))");
    CHECK(self_rel.relationships.empty());
    CHECK(self_rel.malformed_count == 1);

    auto claim = parse_tuples(
        R"(("claim"<|>ACME<|>NONE<|>LEGAL<|>fined in 2022<|>the span<|>2022-01-05<|>2022-03-01))");
    REQUIRE(claim.claims.size() == 1);
    CHECK(claim.claims[0].start_date->to_string() == "2022-01-05");

    auto bad_dates = parse_tuples(
        R"(("claim"<|>ACME<|>NONE<|>LEGAL<|>d<|>s<|>2022-03-01<|>2022-01-05))");
    CHECK(bad_dates.claims.empty());
    CHECK(bad_dates.malformed_count == 1);

    // Prose and non-record parentheses are ignored, not malformed.
    auto prose = parse_tuples("Some text (with an aside) and more words.");
    CHECK(prose.malformed_count == 0);

    auto unterminated = parse_tuples(R"(("entity"<|>ADA<|>PERSON<|>desc)");
    CHECK(unterminated.entities.empty());
    CHECK(unterminated.malformed_count == 0); // no closing paren: ignored
}

TEST_CASE("parse_tuples never throws on arbitrary bytes") {
    Rng rng(555);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string bytes;
        const std::size_t len = rng.bounded(200);
        for (std::size_t i = 0; i < len; ++i) {
            bytes.push_back(static_cast<char>(rng.bounded(256)));
        }
        CHECK_NOTHROW(parse_tuples(bytes));
    }
}

TEST_CASE("max_gleanings = 0 issues exactly one call") {
    auto rig = make_scripted_rig();
    rig.chat->add_script("Extract all entities",
                         "(\"entity\"<|>ADA<|>PERSON<|>mathematician)");
    ExtractionPromptConfig cfg;
    cfg.max_gleanings = 0;
    PromptLibrary prompts;
    auto result = extract_from_chunk(chunk_of("ada lovelace text"), cfg, prompts, *rig.gateway);
    CHECK(rig.chat->call_count() == 1);
    CHECK(result.gleaning_rounds_used == 0);
    CHECK(result.entities.size() == 1);
    CHECK(result.status == ExtractionStatus::Ok);
}

TEST_CASE("gleaning round appends entities after a NO assessment") {
    auto rig = make_scripted_rig();
    rig.chat->add_script("Extract all entities",
                         "(\"entity\"<|>ADA<|>PERSON<|>mathematician)\n"
                         "(\"entity\"<|>BABBAGE<|>PERSON<|>engineer)");
    rig.chat->add_script("were all entities extracted", "NO", 1);
    rig.chat->add_script("MANY entities were missed in the last extraction",
                         "(\"entity\"<|>LOVELACE ESTATE<|>LOCATION<|>family home)");
    rig.chat->add_script("were all entities extracted", "YES", 1);

    ExtractionPromptConfig cfg;
    cfg.max_gleanings = 3;
    PromptLibrary prompts;
    auto result = extract_from_chunk(chunk_of("text"), cfg, prompts, *rig.gateway);

    CHECK(result.entities.size() == 3);
    CHECK(result.gleaning_rounds_used == 1);
    // extract, assess(NO), glean, assess(YES) = 4 calls
    CHECK(rig.chat->call_count() == 4);
    CHECK(rig.chat->call_count() <= 1 + 2 * static_cast<std::size_t>(cfg.max_gleanings));
}

TEST_CASE("immediate YES stops gleaning after one assessment") {
    auto rig = make_scripted_rig();
    rig.chat->add_script("Extract all entities", "(\"entity\"<|>ADA<|>PERSON<|>x)");
    rig.chat->add_script("were all entities extracted", "YES");
    ExtractionPromptConfig cfg;
    cfg.max_gleanings = 3;
    PromptLibrary prompts;
    auto result = extract_from_chunk(chunk_of("text"), cfg, prompts, *rig.gateway);
    CHECK(result.gleaning_rounds_used == 0);
    CHECK(rig.chat->call_count() == 2); // extract + assess
}

TEST_CASE("assessment request forces the yes/no decision via logit bias") {
    auto rig = make_scripted_rig();
    rig.chat->add_script("Extract all entities", "(\"entity\"<|>A B<|>PERSON<|>x)");
    rig.chat->add_script("were all entities extracted", "YES");
    ExtractionPromptConfig cfg;
    cfg.max_gleanings = 1;
    PromptLibrary prompts;
    extract_from_chunk(chunk_of("text"), cfg, prompts, *rig.gateway);

    // The assessment is the second call; its prompt carries the yes/no
    // phrasing and the request biased both decision tokens by 100.
    auto log = rig.chat->call_log();
    REQUIRE(log.size() == 2);
    CHECK(log[1].last_user.find("were all entities extracted") != std::string::npos);
    CHECK(log[1].logit_bias.at("YES") == 100.0);
    CHECK(log[1].logit_bias.at("NO") == 100.0);
}

TEST_CASE("gleaning failure keeps base results and degrades") {
    auto rig = make_scripted_rig();
    rig.chat->add_script("Extract all entities", "(\"entity\"<|>ADA<|>PERSON<|>x)");
    // no script entry for the assessment: the mock rejects it
    ExtractionPromptConfig cfg;
    cfg.max_gleanings = 2;
    PromptLibrary prompts;
    auto result = extract_from_chunk(chunk_of("text"), cfg, prompts, *rig.gateway);
    CHECK(result.status == ExtractionStatus::Degraded);
    CHECK(result.entities.size() == 1);
}

TEST_CASE("gleaning monotonicity under the hash mock") {
    auto rig = make_hash_rig(11);
    PromptLibrary prompts;
    for (int i = 0; i < 10; ++i) {
        ExtractionPromptConfig none;
        none.max_gleanings = 0;
        ExtractionPromptConfig some;
        some.max_gleanings = 2;
        auto chunk = chunk_of("content block " + std::to_string(i), "c" + std::to_string(i));
        auto base = extract_from_chunk(chunk, none, prompts, *rig.gateway);
        auto gleaned = extract_from_chunk(chunk, some, prompts, *rig.gateway);
        CHECK(gleaned.entities.size() >= base.entities.size());
    }
}

TEST_CASE("run_extraction orders results and tolerates partial failure") {
    auto rig = make_scripted_rig();
    // Chunks mention their own index; chunk 4's extraction has no script
    // entry so that chunk fails.
    for (int i = 0; i < 10; ++i) {
        if (i == 4) continue;
        rig.chat->add_script("payload-" + std::to_string(i),
                             "(\"entity\"<|>E" + std::to_string(i) + "<|>PERSON<|>d)");
    }
    std::vector<TextChunk> chunks;
    for (int i = 0; i < 10; ++i) {
        auto c = chunk_of("payload-" + std::to_string(i), "chunk-" + std::to_string(i));
        c.index_in_document = static_cast<std::size_t>(i);
        chunks.push_back(c);
    }
    ExtractionPromptConfig cfg;
    cfg.max_gleanings = 0;
    PromptLibrary prompts;
    auto results = run_extraction(chunks, cfg, prompts, *rig.gateway);

    REQUIRE(results.size() == 10);
    int failed = 0;
    for (int i = 0; i < 10; ++i) {
        CHECK(results[i].chunk_id == "chunk-" + std::to_string(i));
        if (results[i].status == ExtractionStatus::Failed) ++failed;
    }
    CHECK(failed == 1);
    CHECK(results[4].status == ExtractionStatus::Failed);
}

TEST_CASE("run_extraction aborts only when every chunk fails") {
    auto rig = make_scripted_rig(); // empty script: everything rejected
    std::vector<TextChunk> chunks = {chunk_of("a", "c0"), chunk_of("b", "c1")};
    ExtractionPromptConfig cfg;
    PromptLibrary prompts;
    CHECK_THROWS_AS(run_extraction(chunks, cfg, prompts, *rig.gateway), BatchAborted);
}

TEST_CASE("identical corpus and seed give identical serialized results") {
    PromptLibrary prompts;
    ExtractionPromptConfig cfg;
    cfg.max_gleanings = 1;

    auto run_once = [&] {
        auto rig = make_hash_rig(99, 4);
        std::vector<TextChunk> chunks;
        for (int i = 0; i < 8; ++i) {
            chunks.push_back(chunk_of("block " + std::to_string(i * 31), "c" + std::to_string(i)));
        }
        auto results = run_extraction(chunks, cfg, prompts, *rig.gateway);
        nlohmann::json dump = nlohmann::json::array();
        for (const auto& r : results) {
            nlohmann::json entities = nlohmann::json::array();
            for (const auto& e : r.entities) entities.push_back(e.name + "/" + e.type);
            dump.push_back({{"chunk", r.chunk_id},
                            {"entities", entities},
                            {"gleanings", r.gleaning_rounds_used}});
        }
        return dump.dump();
    };
    CHECK(run_once() == run_once());
}

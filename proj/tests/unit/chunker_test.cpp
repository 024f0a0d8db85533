#include <doctest.h>

#include "../support/test_support.hpp"
#include "graphsense/chunker.hpp"

using namespace graphsense;

namespace {

Document words_doc(std::size_t tokens, const std::string& id = "doc") {
    Document doc;
    doc.id = id;
    doc.title = id;
    std::string text;
    for (std::size_t i = 0; i < tokens; ++i) {
        if (i > 0) text.push_back(' ');
        text += "w" + std::to_string(i);
    }
    doc.text = std::move(text);
    return doc;
}

std::vector<std::string> tokens_of(const TokenCodec& codec, const std::string& text) {
    std::vector<std::string> out;
    for (const auto& span : codec.token_spans(text)) {
        out.push_back(text.substr(span.begin, span.end - span.begin));
    }
    return out;
}

} // namespace

TEST_CASE("short document stays one chunk") {
    WhitespaceCodec codec;
    auto chunks = chunk_document(words_doc(300), {600, 100}, codec);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].token_count == 300);
    CHECK(chunks[0].overlap_tokens == 0);
}

TEST_CASE("1000 tokens at 600/100 gives two chunks with the documented bounds") {
    WhitespaceCodec codec;
    auto doc = words_doc(1000);
    auto chunks = chunk_document(doc, {600, 100}, codec);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].token_count == 600);
    CHECK(chunks[1].token_count == 500);
    CHECK(chunks[1].overlap_tokens == 100);

    // Brute-force token slicing oracle for the boundaries.
    auto all = tokens_of(codec, doc.text);
    auto first = tokens_of(codec, chunks[0].text);
    auto second = tokens_of(codec, chunks[1].text);
    CHECK(std::equal(first.begin(), first.end(), all.begin()));
    CHECK(std::equal(second.begin(), second.end(), all.begin() + 500));
}

TEST_CASE("invalid config rejected") {
    WhitespaceCodec codec;
    CHECK_THROWS_AS(chunk_document(words_doc(10), {100, 100}, codec), InvalidConfig);
    CHECK_THROWS_AS(chunk_document(words_doc(10), {0, 0}, codec), InvalidConfig);
    Document empty;
    empty.id = "empty";
    CHECK_THROWS_AS(chunk_document(empty, {600, 100}, codec), InvalidConfig);

    // Whitespace-only text holds no tokens: nothing to index, no chunk with
    // zero tokens either.
    Document blank;
    blank.id = "blank";
    blank.text = "   \n\t  ";
    CHECK(chunk_document(blank, {600, 100}, codec).empty());
}

TEST_CASE("reconstruction and count formula hold on randomized documents") {
    WhitespaceCodec codec;
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t overlap = rng.bounded(40);
        const std::size_t size = overlap + 1 + rng.bounded(60);
        const std::size_t total = 1 + rng.bounded(400);
        auto doc = words_doc(total, "d" + std::to_string(trial));
        auto chunks = chunk_document(doc, {size, overlap}, codec);

        CHECK(chunks.size() == expected_chunk_count(total, {size, overlap}));

        // Dropping each chunk's leading overlap and concatenating must
        // reproduce the token sequence exactly.
        std::vector<std::string> rebuilt;
        for (const auto& chunk : chunks) {
            auto toks = tokens_of(codec, chunk.text);
            CHECK(chunk.token_count == toks.size());
            rebuilt.insert(rebuilt.end(), toks.begin() + static_cast<long>(chunk.overlap_tokens),
                           toks.end());
        }
        CHECK(rebuilt == tokens_of(codec, doc.text));

        // All but the last chunk are exactly `size` tokens.
        for (std::size_t i = 0; i + 1 < chunks.size(); ++i) {
            CHECK(chunks[i].token_count == size);
        }
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            CHECK(chunks[i].index_in_document == i);
            CHECK(chunks[i].overlap_tokens < chunks[i].token_count);
        }
    }
}

TEST_CASE("chunk ids and boundaries are deterministic") {
    WhitespaceCodec codec;
    auto doc = words_doc(1500);
    auto a = chunk_document(doc, {600, 100}, codec);
    auto b = chunk_document(doc, {600, 100}, codec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].text == b[i].text);
    }
}

TEST_CASE("the 600/100 arithmetic matches the stride formula at corpus scale") {
    WhitespaceCodec codec;
    ChunkingConfig cfg{600, 100};

    // One synthetic million-token document: ceil((1e6 - 100) / 500) = 2000.
    auto big = words_doc(1000000, "big");
    auto chunks = chunk_document(big, cfg, codec);
    CHECK(chunks.size() == expected_chunk_count(1000000, cfg));
    CHECK(chunks.size() == 2000);

    // A multi-document corpus in the same token range lands in the same
    // order of magnitude as a single-document split would.
    std::size_t corpus_chunks = 0;
    for (int d = 0; d < 80; ++d) {
        corpus_chunks += expected_chunk_count(12500, cfg);
    }
    CHECK(corpus_chunks >= 1400);
    CHECK(corpus_chunks <= 2400);
}

#include <doctest.h>

#include "graphsense/errors.hpp"
#include "graphsense/token_codec.hpp"
#include "graphsense/util/rng.hpp"

using namespace graphsense;

TEST_CASE("whitespace codec counts words") {
    WhitespaceCodec codec;
    CHECK(codec.count("") == 0);
    CHECK(codec.count("one two three") == 3);
    CHECK(codec.count("  leading   and trailing  ") == 3);
    CHECK(codec.count("tabs\tand\nnewlines") == 3);
}

TEST_CASE("take_prefix keeps original bytes") {
    WhitespaceCodec codec;
    CHECK(codec.take_prefix("a b c d", 2) == "a b");
    CHECK(codec.take_prefix("a  b  c", 2) == "a  b");
    CHECK(codec.take_prefix("a b", 0) == "");
    CHECK(codec.take_prefix("a b ", 2) == "a b "); // already fits: unchanged
    CHECK(codec.take_prefix("", 5) == "");
}

TEST_CASE("codec contract holds on random strings") {
    WhitespaceCodec codec;
    Rng rng(1234);
    const std::string alphabet = "ab  c\txy\nz ";
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        const std::size_t len = rng.bounded(60);
        for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[rng.bounded(alphabet.size())]);

        const std::size_t total = codec.count(text);
        CHECK(codec.take_prefix(text, total) == text);
        const std::size_t n = rng.bounded(10);
        const std::string prefix = codec.take_prefix(text, n);
        CHECK(codec.count(prefix) <= n);
        CHECK(text.substr(0, prefix.size()) == prefix); // a true prefix
    }
}

TEST_CASE("token spans slice the original text") {
    WhitespaceCodec codec;
    const std::string text = "one  two\tthree four";
    auto spans = codec.token_spans(text);
    REQUIRE(spans.size() == 4);
    CHECK(text.substr(spans[1].begin, spans[1].end - spans[1].begin) == "two");
    CHECK(codec.slice(text, 1, 3) == "two\tthree");
}

TEST_CASE("codec registry") {
    CHECK(make_codec("whitespace")->name() == "whitespace");
    CHECK_THROWS_AS(make_codec("nonexistent"), InvalidConfig);
}

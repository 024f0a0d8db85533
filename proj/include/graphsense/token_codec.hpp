#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace graphsense {

// Byte range of one token inside a text.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Token accounting backs every budget in the pipeline. The codec is pluggable
// per model; the whitespace codec below is the test codec and the default.
//
// Contract: count(take_prefix(t, n)) <= n and take_prefix(t, count(t)) == t.
class TokenCodec {
public:
    virtual ~TokenCodec() = default;

    virtual std::string name() const = 0;

    // Byte ranges of all tokens, in order.
    virtual std::vector<TokenSpan> token_spans(std::string_view text) const = 0;

    virtual std::size_t count(std::string_view text) const {
        return token_spans(text).size();
    }

    // Longest prefix of `text` with at most `max_tokens` tokens. Returns the
    // text unchanged (byte-exact, trailing whitespace included) when it
    // already fits.
    virtual std::string take_prefix(std::string_view text, std::size_t max_tokens) const {
        auto spans = token_spans(text);
        if (spans.size() <= max_tokens) return std::string(text);
        if (max_tokens == 0) return std::string();
        return std::string(text.substr(0, spans[max_tokens - 1].end));
    }

    // Substring covering tokens [first, last), preserving original bytes
    // between the two token boundaries.
    std::string slice(std::string_view text, std::size_t first, std::size_t last) const {
        auto spans = token_spans(text);
        if (first >= last || first >= spans.size()) return std::string();
        last = std::min(last, spans.size());
        return std::string(text.substr(spans[first].begin, spans[last - 1].end - spans[first].begin));
    }
};

// Tokens are maximal runs of non-whitespace bytes.
class WhitespaceCodec final : public TokenCodec {
public:
    std::string name() const override { return "whitespace"; }

    std::vector<TokenSpan> token_spans(std::string_view text) const override {
        std::vector<TokenSpan> spans;
        std::size_t i = 0;
        const std::size_t n = text.size();
        while (i < n) {
            while (i < n && is_ws(text[i])) ++i;
            if (i >= n) break;
            std::size_t begin = i;
            while (i < n && !is_ws(text[i])) ++i;
            spans.push_back({begin, i});
        }
        return spans;
    }

    std::size_t count(std::string_view text) const override {
        std::size_t tokens = 0;
        bool in_token = false;
        for (char c : text) {
            if (is_ws(c)) {
                in_token = false;
            } else if (!in_token) {
                in_token = true;
                ++tokens;
            }
        }
        return tokens;
    }

private:
    static bool is_ws(char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    }
};

// Named codec lookup. Only "whitespace" ships built in; model-specific codecs
// register here.
std::shared_ptr<TokenCodec> make_codec(const std::string& name);

inline std::size_t count_tokens(const TokenCodec& codec, std::string_view text) {
    return codec.count(text);
}

} // namespace graphsense

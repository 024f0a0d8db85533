#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "graphsense/llm/provider.hpp"
#include "graphsense/token_codec.hpp"

namespace graphsense {

// Deterministic offline chat provider with two modes.
//
// Scripted: an ordered fixture of (matcher, reply) pairs; the first
// non-exhausted entry whose matcher substring occurs in the prompt wins.
// Used for protocol tests (gleanings, judging) where exact traces matter.
//
// Hash: the reply is derived from a stable hash of (prompt, seed). The mock
// recognizes the pipeline stage from the marker phrases in the default
// prompt templates and produces a well-formed reply for that stage, so the
// entire pipeline runs offline and byte-identically. Extraction replies draw
// entity names from a fixed pool with planted cluster structure, giving the
// community detection stage realistic input.
class MockChatProvider final : public ChatProvider {
public:
    enum class Mode { Scripted, Hash };

    struct ScriptEntry {
        std::string match;
        std::string reply;
        int max_uses = 0; // 0 = unlimited
        int used = 0;
    };

    struct CallRecord {
        std::string prompt;    // all messages joined
        std::string last_user; // text of the last user message
        std::string reply;
        std::map<std::string, double> logit_bias;
    };

    explicit MockChatProvider(Mode mode, std::uint64_t seed = 0,
                              std::shared_ptr<TokenCodec> codec = std::make_shared<WhitespaceCodec>());

    std::string name() const override { return "mock"; }
    ChatResponse chat(const ChatRequest& request) override;

    void add_script(std::string match, std::string reply, int max_uses = 0);

    std::vector<CallRecord> call_log() const;
    std::size_t call_count() const;
    std::size_t max_concurrent() const;

private:
    std::string scripted_reply(const std::string& prompt);
    std::string hash_reply(const std::string& prompt, const std::string& last_user) const;

    Mode mode_;
    std::uint64_t seed_;
    std::shared_ptr<TokenCodec> codec_;
    mutable std::mutex mutex_;
    std::vector<ScriptEntry> script_;
    std::vector<CallRecord> log_;
    std::size_t in_flight_ = 0;
    std::size_t max_in_flight_ = 0;
};

// Hashed bag-of-words embeddings, L2-normalized. A pure function of the
// input text: identical strings embed identically across runs and platforms.
class MockEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(std::size_t dimension = 64) : dimension_(dimension) {}

    std::string name() const override { return "mock"; }
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

    std::size_t dimension() const { return dimension_; }

private:
    std::size_t dimension_;
};

} // namespace graphsense

#pragma once

#include <string>

#include "graphsense/llm/provider.hpp"

namespace graphsense {

struct HttpProviderConfig {
    std::string endpoint;     // e.g. http://localhost:8080/v1
    std::string model;
    std::string api_key;      // resolved from the configured env var
    int timeout_seconds = 120;
};

// OpenAI-compatible chat completions endpoint ({endpoint}/chat/completions).
// Transient transport failures (connect errors, 429, 5xx) surface as
// TransportError so the gateway's retry policy applies; 4xx responses are
// ProviderRejection and never retried.
class HttpChatProvider final : public ChatProvider {
public:
    explicit HttpChatProvider(HttpProviderConfig config);

    std::string name() const override { return "http:" + config_.model; }
    ChatResponse chat(const ChatRequest& request) override;

private:
    HttpProviderConfig config_;
};

// OpenAI-compatible embeddings endpoint ({endpoint}/embeddings).
class HttpEmbeddingProvider final : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpProviderConfig config);

    std::string name() const override { return "http:" + config_.model; }
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

private:
    HttpProviderConfig config_;
};

} // namespace graphsense

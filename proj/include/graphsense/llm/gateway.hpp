#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>

#include "graphsense/llm/provider.hpp"
#include "graphsense/token_codec.hpp"

namespace graphsense {

struct GatewayOptions {
    std::size_t max_retries = 3;          // retries after the first attempt
    std::chrono::milliseconds retry_base{200};
    std::size_t concurrency = 8;          // cap on simultaneous outbound calls
    std::size_t context_limit_tokens = 128000; // 0 = unlimited
};

// Uniform front door to chat and embedding providers: validates request
// shape, enforces the provider context limit locally before any network
// call, retries transient transport failures with exponential backoff, and
// bounds the number of in-flight requests.
class LlmGateway {
public:
    LlmGateway(ChatProviderPtr chat_provider,
               EmbeddingProviderPtr embedding_provider,
               GatewayOptions options = {},
               std::shared_ptr<TokenCodec> codec = std::make_shared<WhitespaceCodec>());

    ChatResponse chat(const ChatRequest& request);
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts);

    const TokenCodec& codec() const { return *codec_; }
    std::shared_ptr<TokenCodec> codec_ptr() const { return codec_; }
    const GatewayOptions& options() const { return options_; }

    std::size_t chat_calls() const { return chat_calls_.load(); }
    std::size_t retries() const { return retries_.load(); }

    // Test hook; replaces the real backoff sleep.
    void set_sleep_hook(std::function<void(std::chrono::milliseconds)> hook);

private:
    template <typename Fn>
    auto with_retries(Fn&& attempt) -> decltype(attempt());

    void acquire();
    void release();

    ChatProviderPtr chat_provider_;
    EmbeddingProviderPtr embedding_provider_;
    GatewayOptions options_;
    std::shared_ptr<TokenCodec> codec_;
    std::function<void(std::chrono::milliseconds)> sleep_;

    std::mutex slots_mutex_;
    std::condition_variable slots_cv_;
    std::size_t in_flight_ = 0;

    std::atomic<std::size_t> chat_calls_{0};
    std::atomic<std::size_t> retries_{0};
};

using GatewayPtr = std::shared_ptr<LlmGateway>;

} // namespace graphsense

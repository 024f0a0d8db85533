#include "graphsense/llm/gateway.hpp"

#include <condition_variable>
#include <mutex>
#include <thread>

#include "graphsense/errors.hpp"

namespace graphsense {

LlmGateway::LlmGateway(ChatProviderPtr chat_provider,
                       EmbeddingProviderPtr embedding_provider,
                       GatewayOptions options,
                       std::shared_ptr<TokenCodec> codec)
    : chat_provider_(std::move(chat_provider)),
      embedding_provider_(std::move(embedding_provider)),
      options_(options),
      codec_(std::move(codec)),
      sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
    if (options_.concurrency == 0) throw InvalidConfig("llm.concurrency must be >= 1");
}

void LlmGateway::set_sleep_hook(std::function<void(std::chrono::milliseconds)> hook) {
    sleep_ = std::move(hook);
}

void LlmGateway::acquire() {
    std::unique_lock<std::mutex> lock(slots_mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < options_.concurrency; });
    ++in_flight_;
}

void LlmGateway::release() {
    {
        std::lock_guard<std::mutex> lock(slots_mutex_);
        --in_flight_;
    }
    slots_cv_.notify_one();
}

template <typename Fn>
auto LlmGateway::with_retries(Fn&& attempt) -> decltype(attempt()) {
    for (std::size_t tries = 0;; ++tries) {
        try {
            return attempt();
        } catch (const TransportError&) {
            if (tries >= options_.max_retries) throw;
            retries_.fetch_add(1);
            sleep_(options_.retry_base * (1LL << tries));
        }
        // ProviderRejection and BudgetExceeded propagate immediately:
        // request-shape errors never retry.
    }
}

ChatResponse LlmGateway::chat(const ChatRequest& request) {
    if (!chat_provider_) throw InvalidConfig("no chat provider configured");
    if (request.messages.empty()) {
        throw ProviderRejection("chat request has no messages");
    }
    if (request.max_output_tokens == 0) {
        throw ProviderRejection("max_output_tokens must be >= 1");
    }
    if (options_.context_limit_tokens > 0) {
        std::size_t prompt_tokens = 0;
        for (const auto& m : request.messages) prompt_tokens += codec_->count(m.text);
        if (prompt_tokens + request.max_output_tokens > options_.context_limit_tokens) {
            throw BudgetExceeded("request needs " +
                                 std::to_string(prompt_tokens + request.max_output_tokens) +
                                 " tokens; provider context limit is " +
                                 std::to_string(options_.context_limit_tokens));
        }
    }

    acquire();
    chat_calls_.fetch_add(1);
    try {
        ChatResponse out = with_retries([&] { return chat_provider_->chat(request); });
        release();
        return out;
    } catch (...) {
        release();
        throw;
    }
}

std::vector<std::vector<double>> LlmGateway::embed(const std::vector<std::string>& texts) {
    if (!embedding_provider_) throw InvalidConfig("no embedding provider configured");
    if (texts.empty()) throw ProviderRejection("embed requires a non-empty input list");

    acquire();
    std::vector<std::vector<double>> out;
    try {
        out = with_retries([&] { return embedding_provider_->embed(texts); });
        release();
    } catch (...) {
        release();
        throw;
    }
    if (out.size() != texts.size()) {
        throw ProviderRejection("embedding provider returned " + std::to_string(out.size()) +
                                " vectors for " + std::to_string(texts.size()) + " inputs");
    }
    for (const auto& v : out) {
        if (v.size() != out.front().size()) {
            throw ProviderRejection("embedding provider returned mixed dimensions");
        }
    }
    return out;
}

} // namespace graphsense

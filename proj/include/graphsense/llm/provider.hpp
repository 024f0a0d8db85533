#pragma once

#include <memory>
#include <string>
#include <vector>

#include "graphsense/llm/types.hpp"

namespace graphsense {

// A chat-completion backend. Implementations must be safe for concurrent use.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string name() const = 0;
    virtual ChatResponse chat(const ChatRequest& request) = 0;
};

// An embedding backend. One vector per input text, all the same dimension.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string name() const = 0;
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

using ChatProviderPtr = std::shared_ptr<ChatProvider>;
using EmbeddingProviderPtr = std::shared_ptr<EmbeddingProvider>;

} // namespace graphsense

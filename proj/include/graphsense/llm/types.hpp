#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace graphsense {

enum class Role { System, User, Assistant };

inline const char* role_name(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

struct ChatMessage {
    Role role = Role::User;
    std::string text;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    std::size_t max_output_tokens = 1024;
    double temperature = 0.0;
    std::map<std::string, double> logit_bias; // token string -> bias
    std::uint64_t seed = 0;

    static ChatRequest single(std::string user_text, std::size_t max_out = 1024) {
        ChatRequest r;
        r.messages.push_back({Role::User, std::move(user_text)});
        r.max_output_tokens = max_out;
        return r;
    }

    std::string concatenated_text() const {
        std::string out;
        for (const auto& m : messages) {
            if (!out.empty()) out.push_back('\n');
            out += m.text;
        }
        return out;
    }
};

struct ChatResponse {
    std::string text;
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
};

} // namespace graphsense

#include "graphsense/llm/http_provider.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "graphsense/errors.hpp"

namespace graphsense {

namespace {

using nlohmann::json;

// Splits "http://host:port/base" into client target and path prefix.
struct ParsedEndpoint {
    std::string origin; // scheme://host:port
    std::string base_path;
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    if (endpoint.empty()) throw InvalidConfig("http provider requires a non-empty endpoint");
    std::size_t scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw InvalidConfig("endpoint must start with http:// or https://: " + endpoint);
    }
    std::size_t path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string base = endpoint.substr(path_start);
    while (!base.empty() && base.back() == '/') base.pop_back();
    return {endpoint.substr(0, path_start), base};
}

json post_json(const HttpProviderConfig& cfg, const std::string& path, const json& body) {
    ParsedEndpoint ep = parse_endpoint(cfg.endpoint);
    httplib::Client client(ep.origin);
    client.set_connection_timeout(cfg.timeout_seconds, 0);
    client.set_read_timeout(cfg.timeout_seconds, 0);
    client.set_write_timeout(cfg.timeout_seconds, 0);

    httplib::Headers headers;
    if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

    auto result = client.Post(ep.base_path + path, headers, body.dump(), "application/json");
    if (!result) {
        throw TransportError("http request to " + cfg.endpoint + path + " failed: " +
                             httplib::to_string(result.error()));
    }
    if (result->status == 429 || result->status >= 500) {
        throw TransportError("provider returned status " + std::to_string(result->status));
    }
    if (result->status >= 400) {
        throw ProviderRejection("provider rejected request with status " +
                                std::to_string(result->status) + ": " + result->body);
    }
    try {
        return json::parse(result->body);
    } catch (const json::exception& e) {
        throw TransportError(std::string("provider returned unparsable body: ") + e.what());
    }
}

} // namespace

HttpChatProvider::HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {
    parse_endpoint(config_.endpoint); // validate eagerly
}

ChatResponse HttpChatProvider::chat(const ChatRequest& request) {
    json body;
    body["model"] = config_.model;
    body["messages"] = json::array();
    for (const auto& m : request.messages) {
        body["messages"].push_back({{"role", role_name(m.role)}, {"content", m.text}});
    }
    body["max_tokens"] = request.max_output_tokens;
    body["temperature"] = request.temperature;
    if (!request.logit_bias.empty()) {
        json bias = json::object();
        for (const auto& [token, value] : request.logit_bias) bias[token] = value;
        body["logit_bias"] = bias;
    }
    if (request.seed != 0) body["seed"] = request.seed;

    json reply = post_json(config_, "/chat/completions", body);
    ChatResponse out;
    try {
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw ProviderRejection(std::string("malformed chat completion payload: ") + e.what());
    }
    if (reply.contains("usage")) {
        out.prompt_tokens = reply["usage"].value("prompt_tokens", 0);
        out.completion_tokens = reply["usage"].value("completion_tokens", 0);
    }
    return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpProviderConfig config) : config_(std::move(config)) {
    parse_endpoint(config_.endpoint);
}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed(const std::vector<std::string>& texts) {
    json body;
    body["model"] = config_.model;
    body["input"] = texts;

    json reply = post_json(config_, "/embeddings", body);
    std::vector<std::vector<double>> out;
    try {
        for (const auto& item : reply.at("data")) {
            out.push_back(item.at("embedding").get<std::vector<double>>());
        }
    } catch (const json::exception& e) {
        throw ProviderRejection(std::string("malformed embeddings payload: ") + e.what());
    }
    return out;
}

} // namespace graphsense

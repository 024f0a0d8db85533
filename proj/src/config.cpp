#include "graphsense/config.hpp"

#include <fstream>

#include "graphsense/errors.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

const std::vector<ConfigEntry>& Config::schema() {
    static const std::vector<ConfigEntry> kSchema = {
        {"llm.provider", ConfigType::String, "mock", "chat provider: mock or http"},
        {"llm.mock_mode", ConfigType::String, "hash", "mock provider mode: hash or scripted"},
        {"llm.mock_script", ConfigType::String, "", "path to a scripted-mock fixture (JSON)"},
        {"llm.endpoint", ConfigType::String, "", "OpenAI-compatible chat endpoint base URL"},
        {"llm.model", ConfigType::String, "", "chat model name"},
        {"llm.api_key_env", ConfigType::String, "GRAPHSENSE_API_KEY",
         "environment variable holding the API key"},
        {"llm.concurrency", ConfigType::Int, "8", "max simultaneous LLM calls"},
        {"llm.max_retries", ConfigType::Int, "3", "transport retries per call"},
        {"llm.retry_base_ms", ConfigType::Int, "200", "exponential backoff base"},
        {"llm.context_limit_tokens", ConfigType::Int, "128000",
         "provider context limit checked before sending (0 = unlimited)"},
        {"embedding.provider", ConfigType::String, "mock", "embedding provider: mock or http"},
        {"embedding.endpoint", ConfigType::String, "", "OpenAI-compatible embeddings endpoint"},
        {"embedding.model", ConfigType::String, "", "embedding model name"},
        {"embedding.enabled", ConfigType::Bool, "true",
         "build the chunk embedding store during indexing (required for ss)"},
        {"embedding.dimension", ConfigType::Int, "64", "mock embedding dimension"},
        {"codec.name", ConfigType::String, "whitespace", "token codec"},
        {"chunking.size", ConfigType::Int, "600", "chunk size in tokens"},
        {"chunking.overlap", ConfigType::Int, "100", "chunk overlap in tokens"},
        {"extraction.entity_types", ConfigType::String,
         "person,organization,location,event,concept", "entity types for the extraction prompt"},
        {"extraction.max_gleanings", ConfigType::Int, "1", "extra extraction rounds per chunk"},
        {"extraction.claims_enabled", ConfigType::Bool, "false", "extract claim covariates"},
        {"extraction.delimiter", ConfigType::String, "<|>", "tuple field delimiter"},
        {"extraction.yes_token", ConfigType::String, "YES", "assessment yes token"},
        {"extraction.no_token", ConfigType::String, "NO", "assessment no token"},
        {"summarize.element_max_tokens", ConfigType::Int, "500",
         "per-element summary token budget"},
        {"summarize.context_limit_tokens", ConfigType::Int, "8000",
         "community report context budget"},
        {"summarize.summary_limit_tokens", ConfigType::Int, "2000",
         "community report output budget"},
        {"leiden.resolution", ConfigType::Real, "1.0", "modularity resolution gamma"},
        {"leiden.randomness", ConfigType::Real, "0.01", "refinement randomness theta"},
        {"leiden.max_levels", ConfigType::Int, "4", "max hierarchy levels"},
        {"leiden.min_improvement", ConfigType::Real, "1e-9", "quality gain to continue"},
        {"query.batch_token_size", ConfigType::Int, "8000", "map batch token size"},
        {"query.final_context_tokens", ConfigType::Int, "8000", "reduce context budget"},
        {"query.map_max_answer_tokens", ConfigType::Int, "1000", "map answer output budget"},
        {"eval.trials", ConfigType::Int, "5", "judge trials per comparison"},
        {"eval.alternate_order", ConfigType::Bool, "true",
         "alternate answer presentation order across trials"},
        {"seed", ConfigType::Int, "0", "root seed; stages derive their own"},
    };
    return kSchema;
}

Config::Config() {
    for (const auto& e : schema()) values_[e.key] = e.default_value;
}

const ConfigEntry& Config::entry(const std::string& key) const {
    for (const auto& e : schema()) {
        if (e.key == key) return e;
    }
    throw InvalidConfig("unknown config key: " + key);
}

void Config::set(const std::string& key, const std::string& value) {
    entry(key); // validates the key
    values_[key] = value;
    explicit_[key] = true;
}

bool Config::has_explicit(const std::string& key) const {
    auto it = explicit_.find(key);
    return it != explicit_.end() && it->second;
}

void Config::apply_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot read config file: " + path.string());

    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip comments outside quotes.
        bool in_quotes = false;
        std::string cleaned;
        for (char c : line) {
            if (c == '"') in_quotes = !in_quotes;
            if (c == '#' && !in_quotes) break;
            cleaned.push_back(c);
        }
        std::string t = trim(cleaned);
        if (t.empty()) continue;

        if (t.front() == '[') {
            if (t.back() != ']') {
                throw InvalidConfig(path.string() + ":" + std::to_string(line_no) +
                                    ": unterminated section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }

        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw InvalidConfig(path.string() + ":" + std::to_string(line_no) +
                                ": expected key = value");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        value = std::string(strip_quotes(value));
        if (!section.empty()) key = section + "." + key;
        try {
            set(key, value);
        } catch (const InvalidConfig& e) {
            throw InvalidConfig(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::string Config::get_string(const std::string& key) const {
    entry(key);
    return values_.at(key);
}

std::int64_t Config::get_int(const std::string& key) const {
    const auto& e = entry(key);
    if (e.type != ConfigType::Int) throw InvalidConfig(key + " is not an integer key");
    try {
        return std::stoll(values_.at(key));
    } catch (const std::exception&) {
        throw InvalidConfig(key + " = '" + values_.at(key) + "' is not an integer");
    }
}

double Config::get_real(const std::string& key) const {
    const auto& e = entry(key);
    if (e.type != ConfigType::Real && e.type != ConfigType::Int) {
        throw InvalidConfig(key + " is not a numeric key");
    }
    try {
        return std::stod(values_.at(key));
    } catch (const std::exception&) {
        throw InvalidConfig(key + " = '" + values_.at(key) + "' is not a number");
    }
}

bool Config::get_bool(const std::string& key) const {
    const auto& e = entry(key);
    if (e.type != ConfigType::Bool) throw InvalidConfig(key + " is not a boolean key");
    const std::string v = to_lower_ascii(values_.at(key));
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidConfig(key + " = '" + values_.at(key) + "' is not a boolean");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
    std::vector<std::string> out;
    for (auto& part : split(get_string(key), ",")) {
        std::string t = trim(part);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

} // namespace graphsense

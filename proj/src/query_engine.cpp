#include "graphsense/query/engine.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "graphsense/errors.hpp"
#include "graphsense/util/parallel.hpp"
#include "graphsense/util/rng.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

namespace {

using nlohmann::json;

// Extracts {"answer": ..., "score": ...} from the reply, tolerating prose
// around the JSON object. Returns false when no usable payload exists.
bool parse_map_payload(const std::string& reply, std::string& answer, double& score) {
    auto try_parse = [&](std::string_view text) {
        json parsed = json::parse(text, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) return false;
        if (!parsed.contains("answer") || !parsed.contains("score")) return false;
        if (!parsed["answer"].is_string() || !parsed["score"].is_number()) return false;
        answer = parsed["answer"].get<std::string>();
        score = parsed["score"].get<double>();
        return true;
    };
    if (try_parse(trim_view(reply))) return true;
    const std::size_t open = reply.find('{');
    const std::size_t close = reply.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close <= open) return false;
    return try_parse(std::string_view(reply).substr(open, close - open + 1));
}

} // namespace

std::vector<Batch> prepare_batches(const std::vector<SourceRecord>& records,
                                   std::size_t batch_token_size,
                                   std::uint64_t seed,
                                   const TokenCodec& codec) {
    if (records.empty()) throw NoSummaries("no records to batch");
    if (batch_token_size == 0) throw InvalidConfig("batch token size must be positive");

    std::vector<SourceRecord> shuffled = records;
    Rng rng(seed);
    rng.shuffle(shuffled);

    std::vector<Batch> batches;
    Batch current;
    std::vector<std::string> texts;

    auto flush = [&] {
        if (current.record_ids.empty()) return;
        current.index = static_cast<int>(batches.size());
        current.text = join(texts, "\n\n");
        batches.push_back(std::move(current));
        current = Batch{};
        texts.clear();
    };

    for (const auto& record : shuffled) {
        if (record.tokens > batch_token_size) {
            // Oversized record: its own batch, truncated to fit.
            flush();
            Batch big;
            big.index = static_cast<int>(batches.size());
            big.record_ids.push_back(record.id);
            big.text = codec.take_prefix(record.text, batch_token_size);
            big.token_count = codec.count(big.text);
            big.truncated = true;
            batches.push_back(std::move(big));
            continue;
        }
        if (current.token_count + record.tokens > batch_token_size) flush();
        current.record_ids.push_back(record.id);
        current.token_count += record.tokens;
        texts.push_back(record.text);
    }
    flush();
    return batches;
}

RatedAnswer map_answer(const std::string& query,
                       const Batch& batch,
                       const PromptLibrary& prompts,
                       LlmGateway& gateway,
                       std::size_t max_answer_tokens) {
    RatedAnswer out;
    out.batch_index = batch.index;
    if (batch.record_ids.empty()) throw InvalidConfig("map_answer on an empty batch");

    std::string reply;
    try {
        ChatRequest request = ChatRequest::single(
            prompts.render("map_answer", {{"question", query}, {"context", batch.text}}),
            max_answer_tokens);
        reply = gateway.chat(request).text;
    } catch (const Error& e) {
        out.failed = true;
        out.flagged = true;
        out.score = 0;
        out.text = e.what();
        return out;
    }

    std::string answer;
    double score = 0.0;
    if (!parse_map_payload(reply, answer, score)) {
        out.flagged = true;
        out.score = 0;
        out.text = reply; // raw text preserved
        return out;
    }
    out.text = answer;
    if (score < 0.0 || score > 100.0) {
        out.flagged = true;
        score = std::clamp(score, 0.0, 100.0);
    }
    out.score = static_cast<int>(score);
    return out;
}

GlobalAnswer reduce_answers(const std::string& query,
                            const std::vector<RatedAnswer>& rated,
                            std::size_t final_context_tokens,
                            const PromptLibrary& prompts,
                            LlmGateway& gateway,
                            const std::string& context_label) {
    GlobalAnswer out;
    out.total_map_calls = static_cast<int>(rated.size());

    std::vector<RatedAnswer> survivors;
    for (const auto& r : rated) {
        if (r.score == 0) {
            ++out.filtered_zero_count;
        } else {
            survivors.push_back(r);
        }
    }
    std::stable_sort(survivors.begin(), survivors.end(),
                     [](const RatedAnswer& a, const RatedAnswer& b) {
                         if (a.score != b.score) return a.score > b.score;
                         return a.batch_index < b.batch_index;
                     });

    const auto& codec = gateway.codec();
    std::vector<std::string> texts;
    std::size_t packed_tokens = 0;
    for (const auto& r : survivors) {
        const std::string rendered =
            "ANSWER (helpfulness " + std::to_string(r.score) + "): " + r.text;
        const std::size_t tokens = codec.count(rendered);
        if (packed_tokens + tokens > final_context_tokens) break;
        packed_tokens += tokens;
        texts.push_back(rendered);
        out.used_answers.push_back({r.batch_index, r.score, tokens});
    }

    if (out.used_answers.empty()) {
        out.text = kNoAnswerText;
        out.context_tokens_consumed = 0;
        return out;
    }

    try {
        ChatRequest request = ChatRequest::single(
            prompts.render("final_answer", {{"question", query},
                                            {"context", join(texts, "\n")},
                                            {"context_label", context_label},
                                            {"context_label_title", "Material"}}),
            2000);
        out.text = trim(gateway.chat(request).text);
    } catch (const Error& e) {
        throw QueryFailed(std::string("final answer generation failed: ") + e.what());
    }
    out.context_tokens_consumed = packed_tokens;
    return out;
}

GlobalAnswer map_reduce_answer(const std::string& query,
                               const std::vector<SourceRecord>& records,
                               const QueryConfig& cfg,
                               const PromptLibrary& prompts,
                               LlmGateway& gateway) {
    if (trim_view(query).empty()) {
        throw ProviderRejection("query must not be empty");
    }
    auto batches = prepare_batches(records, cfg.batch_token_size, cfg.seed, gateway.codec());

    std::vector<RatedAnswer> rated(batches.size());
    std::size_t batch_tokens = 0;
    for (const auto& b : batches) batch_tokens += b.token_count;

    parallel_for(batches.size(), gateway.options().concurrency, [&](std::size_t i) {
        rated[i] = map_answer(query, batches[i], prompts, gateway, cfg.map_max_answer_tokens);
    });

    GlobalAnswer out =
        reduce_answers(query, rated, cfg.final_context_tokens, prompts, gateway);
    out.context_tokens_consumed += batch_tokens;
    return out;
}

std::vector<SourceRecord> summary_records(
    const std::vector<std::vector<CommunitySummary>>& summaries_by_level,
    const ProjectedLevel& level,
    const TokenCodec& codec) {
    std::vector<SourceRecord> records;
    records.reserve(level.communities.size());
    for (const auto& ref : level.communities) {
        const auto& summary =
            summaries_by_level[static_cast<std::size_t>(ref.level)][static_cast<std::size_t>(ref.id)];
        SourceRecord record;
        record.id = "L" + std::to_string(ref.level) + ".C" + std::to_string(ref.id);
        record.text = summary.rendered();
        record.tokens = codec.count(record.text);
        records.push_back(std::move(record));
    }
    return records;
}

GlobalAnswer answer_with_summaries(const std::string& query,
                                   const CommunityHierarchy& hierarchy,
                                   const std::vector<std::vector<CommunitySummary>>& summaries,
                                   const QueryConfig& cfg,
                                   const PromptLibrary& prompts,
                                   LlmGateway& gateway) {
    ProjectedLevel level = project_level(hierarchy, cfg.level);
    auto records = summary_records(summaries, level, gateway.codec());
    GlobalAnswer out = map_reduce_answer(query, records, cfg, prompts, gateway);
    out.condition = "c" + std::to_string(cfg.level);
    return out;
}

} // namespace graphsense

#include "graphsense/query/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "graphsense/errors.hpp"
#include "graphsense/util/parallel.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

namespace {

void normalize(std::vector<double>& v) {
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 <= 0.0) return;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
}

} // namespace

GlobalAnswer ts_answer(const std::string& query,
                       const std::vector<TextChunk>& chunks,
                       const QueryConfig& cfg,
                       const PromptLibrary& prompts,
                       LlmGateway& gateway) {
    if (chunks.empty()) throw NoSummaries("ts condition requires at least one chunk");
    std::vector<SourceRecord> records;
    records.reserve(chunks.size());
    for (const auto& chunk : chunks) {
        records.push_back({chunk.id, chunk.text, chunk.token_count});
    }
    GlobalAnswer out = map_reduce_answer(query, records, cfg, prompts, gateway);
    out.condition = "ts";
    return out;
}

ChunkEmbeddingStore build_embedding_store(const std::vector<TextChunk>& chunks,
                                          LlmGateway& gateway) {
    if (chunks.empty()) throw NoSummaries("cannot build an embedding store without chunks");

    constexpr std::size_t kBatch = 32;
    const std::size_t batches = (chunks.size() + kBatch - 1) / kBatch;
    std::vector<std::vector<std::vector<double>>> results(batches);

    parallel_for(batches, gateway.options().concurrency, [&](std::size_t b) {
        std::vector<std::string> texts;
        const std::size_t begin = b * kBatch;
        const std::size_t end = std::min(begin + kBatch, chunks.size());
        for (std::size_t i = begin; i < end; ++i) texts.push_back(chunks[i].text);
        results[b] = gateway.embed(texts);
    });

    ChunkEmbeddingStore store;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t begin = b * kBatch;
        for (std::size_t j = 0; j < results[b].size(); ++j) {
            ChunkEmbedding entry;
            entry.chunk_id = chunks[begin + j].id;
            entry.vector = std::move(results[b][j]);
            entry.token_count = chunks[begin + j].token_count;
            normalize(entry.vector);
            store.entries.push_back(std::move(entry));
        }
    }
    if (!store.entries.empty()) store.dimension = store.entries.front().vector.size();
    for (const auto& e : store.entries) {
        if (e.vector.size() != store.dimension) {
            throw ProviderRejection("embedding store has mixed dimensions");
        }
    }
    return store;
}

std::vector<RankedChunk> rank_chunks(const ChunkEmbeddingStore& store,
                                     const std::vector<double>& query_vector) {
    std::vector<RankedChunk> ranked;
    ranked.reserve(store.entries.size());
    for (const auto& entry : store.entries) {
        double dot = 0.0;
        for (std::size_t i = 0; i < entry.vector.size() && i < query_vector.size(); ++i) {
            dot += entry.vector[i] * query_vector[i];
        }
        ranked.push_back({entry.chunk_id, dot});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedChunk& a, const RankedChunk& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    return ranked;
}

GlobalAnswer ss_answer(const std::string& query,
                       const ChunkEmbeddingStore& store,
                       const std::vector<TextChunk>& chunks,
                       std::size_t context_limit_tokens,
                       const PromptLibrary& prompts,
                       LlmGateway& gateway) {
    if (trim_view(query).empty()) throw ProviderRejection("query must not be empty");
    if (store.entries.empty()) throw NoIndex("embedding store is empty");

    std::vector<double> query_vector = gateway.embed({query}).front();
    normalize(query_vector);
    auto ranked = rank_chunks(store, query_vector);

    std::map<std::string, const TextChunk*> by_id;
    for (const auto& c : chunks) by_id[c.id] = &c;

    GlobalAnswer out;
    out.condition = "ss";
    std::vector<std::string> texts;
    std::size_t packed = 0;
    for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
        auto it = by_id.find(ranked[rank].chunk_id);
        if (it == by_id.end()) {
            throw NoIndex("embedding store references unknown chunk " + ranked[rank].chunk_id);
        }
        const std::size_t tokens = it->second->token_count;
        if (packed + tokens > context_limit_tokens) break;
        packed += tokens;
        texts.push_back(it->second->text);
        const int score =
            static_cast<int>(std::lround(std::clamp(ranked[rank].score, 0.0, 1.0) * 100.0));
        out.used_answers.push_back({static_cast<int>(rank), score, tokens});
    }

    try {
        ChatRequest request = ChatRequest::single(
            prompts.render("final_answer",
                           {{"question", query},
                            {"context", join(texts, "\n\n")},
                            {"context_label", "retrieved source text excerpts"},
                            {"context_label_title", "Source excerpts"}}),
            2000);
        out.text = trim(gateway.chat(request).text);
    } catch (const Error& e) {
        throw QueryFailed(std::string("ss answer generation failed: ") + e.what());
    }
    out.context_tokens_consumed = packed;
    out.total_map_calls = 0;
    return out;
}

} // namespace graphsense

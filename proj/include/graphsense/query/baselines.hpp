#pragma once

#include <vector>

#include "graphsense/core/model.hpp"
#include "graphsense/query/engine.hpp"

namespace graphsense {

// TS condition: the map-reduce machinery applied directly to source chunks.
// Shares prepare_batches / map_answer / reduce_answers with the graph
// conditions via map_reduce_answer.
GlobalAnswer ts_answer(const std::string& query,
                       const std::vector<TextChunk>& chunks,
                       const QueryConfig& cfg,
                       const PromptLibrary& prompts,
                       LlmGateway& gateway);

struct ChunkEmbedding {
    std::string chunk_id;
    std::vector<double> vector; // unit L2 norm
    std::size_t token_count = 0;
};

struct ChunkEmbeddingStore {
    std::vector<ChunkEmbedding> entries; // in chunk order
    std::size_t dimension = 0;
};

// Embeds every chunk (batched calls under the gateway cap) and normalizes
// the vectors. Gateway errors are fatal: an embedding store is all or
// nothing.
ChunkEmbeddingStore build_embedding_store(const std::vector<TextChunk>& chunks,
                                          LlmGateway& gateway);

struct RankedChunk {
    std::string chunk_id;
    double score = 0.0; // cosine similarity
};

// Exact full-scan cosine ranking, descending, ties by chunk id. No
// approximate index: desk-scale corpora keep exactness cheap.
std::vector<RankedChunk> rank_chunks(const ChunkEmbeddingStore& store,
                                     const std::vector<double>& query_vector);

// SS condition: embed the query, rank chunks by cosine, pack chunk texts
// greedily until the token limit would be exceeded, answer in one LLM call.
GlobalAnswer ss_answer(const std::string& query,
                       const ChunkEmbeddingStore& store,
                       const std::vector<TextChunk>& chunks,
                       std::size_t context_limit_tokens,
                       const PromptLibrary& prompts,
                       LlmGateway& gateway);

} // namespace graphsense

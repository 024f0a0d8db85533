#pragma once

#include <vector>

#include "graphsense/core/model.hpp"
#include "graphsense/token_codec.hpp"

namespace graphsense {

struct ChunkingConfig {
    std::size_t chunk_size_tokens = 600;
    std::size_t overlap_tokens = 100;
};

// Splits a document into fixed-size token chunks with fixed overlap.
// Boundaries are strict token offsets: chunk k covers tokens
// [k*stride, k*stride + size) with stride = size - overlap. The final chunk
// may be shorter; it is never merged backward. Chunk text is the original
// byte range between its first and last token, so dropping the first
// overlap_tokens tokens of every chunk after the first and concatenating
// reproduces the document's token sequence exactly.
std::vector<TextChunk> chunk_document(const Document& doc,
                                      const ChunkingConfig& cfg,
                                      const TokenCodec& codec);

// max(1, ceil((total_tokens - overlap) / stride)); the count produced by
// chunk_document for any document with total_tokens > 0.
std::size_t expected_chunk_count(std::size_t total_tokens, const ChunkingConfig& cfg);

} // namespace graphsense

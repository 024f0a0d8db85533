#include "graphsense/chunker.hpp"

#include "graphsense/util/hash.hpp"

namespace graphsense {

namespace {

void validate(const ChunkingConfig& cfg) {
    if (cfg.chunk_size_tokens == 0 || cfg.chunk_size_tokens <= cfg.overlap_tokens) {
        throw InvalidConfig("chunking requires chunk_size_tokens > overlap_tokens >= 0");
    }
}

} // namespace

std::size_t expected_chunk_count(std::size_t total_tokens, const ChunkingConfig& cfg) {
    validate(cfg);
    const std::size_t stride = cfg.chunk_size_tokens - cfg.overlap_tokens;
    if (total_tokens <= cfg.overlap_tokens) return 1;
    const std::size_t remaining = total_tokens - cfg.overlap_tokens;
    std::size_t count = (remaining + stride - 1) / stride;
    return count == 0 ? 1 : count;
}

std::vector<TextChunk> chunk_document(const Document& doc,
                                      const ChunkingConfig& cfg,
                                      const TokenCodec& codec) {
    validate(cfg);
    if (doc.text.empty()) {
        throw InvalidConfig("document '" + doc.id + "' has empty text");
    }

    const auto spans = codec.token_spans(doc.text);
    const std::size_t total = spans.size();
    std::vector<TextChunk> chunks;
    if (total == 0) return chunks; // whitespace-only document: nothing to index

    const std::size_t stride = cfg.chunk_size_tokens - cfg.overlap_tokens;
    for (std::size_t start = 0, index = 0;; start += stride, ++index) {
        const std::size_t end = std::min(start + cfg.chunk_size_tokens, total);
        TextChunk chunk;
        chunk.document_id = doc.id;
        chunk.index_in_document = index;
        chunk.text = doc.text.substr(spans[start].begin, spans[end - 1].end - spans[start].begin);
        chunk.token_count = end - start;
        chunk.overlap_tokens = index == 0 ? 0 : cfg.overlap_tokens;
        chunk.id = doc.id + "-" + std::to_string(index) + "-" +
                   hex_tag(fnv1a64(chunk.text, fnv1a64(doc.id)));
        chunks.push_back(std::move(chunk));
        if (end >= total) break;
    }
    return chunks;
}

} // namespace graphsense

#pragma once

#include <vector>

#include "graphsense/community/summarizer.hpp"
#include "graphsense/extractor.hpp"
#include "graphsense/graph/leiden.hpp"
#include "graphsense/query/baselines.hpp"
#include "graphsense/workspace/workspace.hpp"

namespace graphsense {

// Typed adapters between pipeline records and the workspace stage files.
// Serialization is canonical: object keys sort automatically, record order
// is the pipeline's deterministic order, so identical runs produce
// byte-identical files.

void save_chunks(Workspace& ws, const std::vector<TextChunk>& chunks);
std::vector<TextChunk> load_chunks(const Workspace& ws);

void save_extraction(Workspace& ws, const std::vector<ExtractionResult>& results);
std::vector<ExtractionResult> load_extraction(const Workspace& ws);

void save_element_summaries(Workspace& ws, const ElementSummaries& elements);
ElementSummaries load_element_summaries(const Workspace& ws);

void save_graph(Workspace& ws, const EntityGraph& graph);
EntityGraph load_graph(const Workspace& ws);

void save_hierarchy(Workspace& ws, const CommunityHierarchy& hierarchy);
CommunityHierarchy load_hierarchy(const Workspace& ws, std::size_t node_count);

void save_community_summaries(Workspace& ws,
                              const std::vector<std::vector<CommunitySummary>>& summaries);
std::vector<std::vector<CommunitySummary>> load_community_summaries(const Workspace& ws);

void save_embeddings(Workspace& ws, const ChunkEmbeddingStore& store);
ChunkEmbeddingStore load_embeddings(const Workspace& ws);

} // namespace graphsense

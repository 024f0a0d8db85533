#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphsense/extractor.hpp"
#include "graphsense/llm/gateway.hpp"

namespace graphsense {

struct InstanceNote {
    std::string chunk_id;
    std::string original_name; // spelling as extracted; empty for relationships
    std::string description;
};

struct EntityGroup {
    EntityKey key;
    std::vector<InstanceNote> instances;
    bool placeholder = false; // synthesized for a dangling relationship endpoint
};

struct RelationshipGroup {
    // Unordered pair of normalized names, first <= second.
    std::pair<std::string, std::string> names;
    // Endpoint identities resolved against the extracted entities (or
    // placeholders), in the same order as `names`.
    std::pair<EntityKey, EntityKey> endpoints;
    std::vector<InstanceNote> instances;
};

struct ClaimGroup {
    EntityKey subject;
    std::string object;
    std::string type;
    std::vector<ClaimInstance> instances;
};

struct ElementGroups {
    std::vector<EntityGroup> entities;
    std::vector<RelationshipGroup> relationships;
    std::vector<ClaimGroup> claims;
};

// Groups instances by element identity: entities by (normalized name, type),
// relationships by unordered normalized name pair, claims by (subject, object,
// type). Relationship endpoints that match no extracted entity get placeholder
// entity groups so every edge stays materializable. Output order is canonical
// by key.
ElementGroups group_instances(std::span<const ExtractionResult> results);

struct EntitySummary {
    EntityKey key;
    std::string display_name;
    std::string description;
    std::size_t token_count = 0;
    std::size_t instance_count = 0;
    std::vector<std::string> source_chunk_ids;
    bool degraded = false;
    bool placeholder = false;
};

struct RelationshipSummary {
    EntityKey source; // source <= target by key order
    EntityKey target;
    std::string description;
    std::size_t token_count = 0;
    std::size_t instance_count = 0;
    std::vector<std::string> source_chunk_ids;
    bool degraded = false;
};

struct ClaimSummary {
    EntityKey subject;
    std::string object;
    std::string type;
    std::string description;
    std::size_t token_count = 0;
    std::size_t instance_count = 0;
    std::vector<std::string> source_chunk_ids;
    bool degraded = false;
};

struct ElementSummaries {
    std::vector<EntitySummary> entities;
    std::vector<RelationshipSummary> relationships;
    std::vector<ClaimSummary> claims;
};

inline constexpr std::size_t kDefaultElementSummaryTokens = 500;
inline constexpr const char* kNoDescription = "(no description available)";

// Single-instance groups pass their description through without an LLM call.
// Multi-instance groups are consolidated by the LLM into at most
// max_summary_tokens tokens; on gateway failure the fallback is the
// concatenated descriptions truncated to the budget, flagged degraded.
EntitySummary summarize_element(const EntityGroup& group,
                                const PromptLibrary& prompts,
                                LlmGateway& gateway,
                                std::size_t max_summary_tokens = kDefaultElementSummaryTokens);

RelationshipSummary summarize_element(const RelationshipGroup& group,
                                      const PromptLibrary& prompts,
                                      LlmGateway& gateway,
                                      std::size_t max_summary_tokens = kDefaultElementSummaryTokens);

ClaimSummary summarize_element(const ClaimGroup& group,
                               const PromptLibrary& prompts,
                               LlmGateway& gateway,
                               std::size_t max_summary_tokens = kDefaultElementSummaryTokens);

// Batch driver: all groups, concurrent under the gateway cap, canonical
// output order.
ElementSummaries summarize_elements(const ElementGroups& groups,
                                    const PromptLibrary& prompts,
                                    LlmGateway& gateway,
                                    std::size_t max_summary_tokens = kDefaultElementSummaryTokens);

} // namespace graphsense

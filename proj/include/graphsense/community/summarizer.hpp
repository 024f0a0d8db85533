#pragma once

#include <string>
#include <vector>

#include "graphsense/graph/leiden.hpp"
#include "graphsense/llm/gateway.hpp"
#include "graphsense/prompts.hpp"

namespace graphsense {

struct PackingBudget {
    std::size_t context_limit_tokens = 8000;
    std::size_t summary_limit_tokens = 2000;
};

// One packed context item (an element summary or a sub-community report).
struct PackedItem {
    std::string id;
    std::string text;
    std::size_t tokens = 0;
};

struct PackedContext {
    std::string text;
    std::vector<std::string> ledger; // item ids in packing order
    std::size_t token_count = 0;     // sum of packed item tokens
    bool truncated = false;          // halted at the first overflowing item
    std::size_t substitutions = 0;   // sub-community summaries substituted
};

struct CommunitySummary {
    int level = 0;
    int community_id = 0;
    std::string title;
    std::string body;
    std::size_t token_count = 0;         // tokens of title + body
    std::size_t context_token_count = 0; // tokens of the packed input
    std::vector<std::string> inputs_used;
    bool truncated_context = false;
    bool degraded = false;
    bool reused_from_child = false;

    std::string rendered() const { return title + "\n" + body; }
};

// Leaf-level packing: community edges in decreasing combined source+target
// degree order (ties by lexicographic endpoint keys); per edge append source
// node description, target node description, linked claims, then the edge
// description, skipping items already packed. Packing is a greedy prefix:
// it halts at the first item that would exceed the budget. Nodes with no
// in-community edges follow in decreasing degree order.
PackedContext pack_leaf_context(const Community& community,
                                const EntityGraph& graph,
                                const ElementSummaries& elements,
                                const PackingBudget& budget,
                                const TokenCodec& codec);

// Higher-level packing: when all element summaries fit, identical to
// pack_leaf_context. Otherwise sub-communities are ranked by their element
// token totals (descending) and each one's elements are substituted by its
// report, one at a time, until the total fits; substitutions that would not
// shrink the total are skipped. If everything substituted still overflows,
// falls back to a greedy prefix over the sub-community reports in rank order.
PackedContext pack_hierarchical_context(const Community& community,
                                        const std::vector<Community>& children,
                                        const std::vector<CommunitySummary>& child_summaries,
                                        const EntityGraph& graph,
                                        const ElementSummaries& elements,
                                        const PackingBudget& budget,
                                        const TokenCodec& codec);

// Bottom-up report generation: leaves first, then each higher level from
// its children's reports. Communities identical to their single child reuse
// the child's report without an LLM call. Per-community LLM failures produce
// a degraded summary (truncated packed context) and are flagged.
std::vector<std::vector<CommunitySummary>> summarize_all_communities(
    const CommunityHierarchy& hierarchy,
    const EntityGraph& graph,
    const ElementSummaries& elements,
    const PackingBudget& budget,
    const PromptLibrary& prompts,
    LlmGateway& gateway);

} // namespace graphsense

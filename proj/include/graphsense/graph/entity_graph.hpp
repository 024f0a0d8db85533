#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "graphsense/element_summarizer.hpp"

namespace graphsense {

struct EntityNode {
    EntityKey key;
    std::string display_name;
    std::string description;
    bool placeholder = false;
};

struct RelationshipEdge {
    std::uint32_t source = 0; // node indices; source < target
    std::uint32_t target = 0;
    std::string description;
    double weight = 0.0;            // raw relationship instance count
    double normalized_weight = 0.0; // weight / max weight, for reporting only
    std::size_t instance_count = 0;
};

// Homogeneous undirected weighted graph over entity keys. Nodes are sorted by
// key; at most one edge per unordered node pair; no self-loops. Community
// detection consumes the raw instance-count weights; the min-max normalized
// weight is carried for display (the partition is invariant under uniform
// positive scaling, so the two choices agree).
class EntityGraph {
public:
    std::vector<EntityNode> nodes;
    std::vector<RelationshipEdge> edges;

    // Edge ids incident to each node, one per distinct neighbor.
    std::vector<std::vector<std::uint32_t>> incident;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return edges.size(); }

    // Distinct-neighbor count (unweighted).
    std::size_t degree(std::uint32_t node) const { return incident[node].size(); }

    std::uint32_t other_end(const RelationshipEdge& e, std::uint32_t node) const {
        return e.source == node ? e.target : e.source;
    }

    // -1 when the key is unknown.
    std::int64_t find_node(const EntityKey& key) const;

    double total_edge_weight() const;
};

EntityGraph build_graph(const std::vector<EntitySummary>& entity_summaries,
                        const std::vector<RelationshipSummary>& relationship_summaries);

// degree(source) + degree(target); the edge-priority key for context packing.
std::size_t combined_degree(const EntityGraph& graph, std::uint32_t edge_id);

// Plain "source<TAB>target<TAB>weight" lines for external graph tooling.
void export_edge_list(const EntityGraph& graph, std::ostream& out);

} // namespace graphsense

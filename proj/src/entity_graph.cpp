#include "graphsense/graph/entity_graph.hpp"

#include <algorithm>

#include "graphsense/errors.hpp"

namespace graphsense {

std::int64_t EntityGraph::find_node(const EntityKey& key) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), key,
                               [](const EntityNode& n, const EntityKey& k) { return n.key < k; });
    if (it == nodes.end() || !(it->key == key)) return -1;
    return it - nodes.begin();
}

double EntityGraph::total_edge_weight() const {
    double total = 0.0;
    for (const auto& e : edges) total += e.weight;
    return total;
}

EntityGraph build_graph(const std::vector<EntitySummary>& entity_summaries,
                        const std::vector<RelationshipSummary>& relationship_summaries) {
    EntityGraph graph;

    graph.nodes.reserve(entity_summaries.size());
    for (const auto& s : entity_summaries) {
        graph.nodes.push_back({s.key, s.display_name, s.description, s.placeholder});
    }
    std::sort(graph.nodes.begin(), graph.nodes.end(),
              [](const EntityNode& a, const EntityNode& b) { return a.key < b.key; });

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> edge_index;
    for (const auto& r : relationship_summaries) {
        std::int64_t a = graph.find_node(r.source);
        std::int64_t b = graph.find_node(r.target);
        if (a < 0 || b < 0) {
            throw InvalidConfig("relationship endpoint missing from entity summaries: " +
                                r.source.to_string() + " -- " + r.target.to_string());
        }
        if (a == b) continue; // self-loops never enter the graph
        auto lo = static_cast<std::uint32_t>(std::min(a, b));
        auto hi = static_cast<std::uint32_t>(std::max(a, b));

        auto [it, inserted] = edge_index.try_emplace({lo, hi}, graph.edges.size());
        if (inserted) {
            RelationshipEdge edge;
            edge.source = lo;
            edge.target = hi;
            edge.description = r.description;
            edge.weight = static_cast<double>(r.instance_count);
            edge.instance_count = r.instance_count;
            graph.edges.push_back(std::move(edge));
        } else {
            // Two relationship groups can land on one node pair only through
            // endpoint resolution; fold them into the existing edge.
            auto& edge = graph.edges[it->second];
            edge.weight += static_cast<double>(r.instance_count);
            edge.instance_count += r.instance_count;
            if (!r.description.empty()) {
                edge.description += edge.description.empty() ? "" : " ";
                edge.description += r.description;
            }
        }
    }

    double max_weight = 0.0;
    for (const auto& e : graph.edges) max_weight = std::max(max_weight, e.weight);
    for (auto& e : graph.edges) {
        e.normalized_weight = max_weight > 0.0 ? e.weight / max_weight : 0.0;
    }

    graph.incident.assign(graph.nodes.size(), {});
    for (std::uint32_t id = 0; id < graph.edges.size(); ++id) {
        graph.incident[graph.edges[id].source].push_back(id);
        graph.incident[graph.edges[id].target].push_back(id);
    }
    return graph;
}

std::size_t combined_degree(const EntityGraph& graph, std::uint32_t edge_id) {
    if (edge_id >= graph.edges.size()) {
        throw UnknownEdge("edge id " + std::to_string(edge_id) + " out of range");
    }
    const auto& e = graph.edges[edge_id];
    return graph.degree(e.source) + graph.degree(e.target);
}

void export_edge_list(const EntityGraph& graph, std::ostream& out) {
    for (const auto& e : graph.edges) {
        out << graph.nodes[e.source].key.to_string() << '\t'
            << graph.nodes[e.target].key.to_string() << '\t' << e.weight << '\n';
    }
}

} // namespace graphsense

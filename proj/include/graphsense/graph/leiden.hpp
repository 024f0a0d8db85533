#pragma once

#include <cstdint>
#include <vector>

#include "graphsense/graph/entity_graph.hpp"

namespace graphsense {

struct LeidenConfig {
    double resolution = 1.0;   // gamma in the modularity quality function
    double randomness = 0.01;  // theta: refinement merge temperature
    std::uint64_t seed = 0;
    std::size_t max_levels = 4;
    double min_improvement = 1e-9;
    // Independent seeded runs; the one with the best leaf-level quality wins.
    // Local moves are order-sensitive and a single unlucky order can park a
    // small graph in a saddle, so a few restarts keep desk-scale results near
    // the optimum. All restarts draw from the same seeded generator.
    std::size_t restarts = 8;
};

// One community of the hierarchy. Node ids index EntityGraph.nodes.
struct Community {
    int level = 0;
    int id = 0;
    int parent_id = -1; // -1 at the root level
    std::vector<std::uint32_t> nodes; // sorted
    bool same_as_parent = false;      // identical node set as its parent
};

// Leveled partitions of the graph's nodes, root (level 0, coarsest) to
// leaves. Every level is MECE over all nodes and nests inside the previous
// level; a community that does not split carries down as a same_as_parent
// copy so each level stays a complete partition.
struct CommunityHierarchy {
    std::vector<std::vector<Community>> levels;
    std::vector<std::vector<int>> assignments; // per level: node -> community id

    int num_levels() const { return static_cast<int>(levels.size()); }
    int deepest_level() const { return num_levels() - 1; }
};

// Modularity with resolution gamma:
//   Q = sum_c [ w(c)/m - gamma * (K(c)/(2m))^2 ]
// where m is total edge weight, w(c) the intra-community edge weight and
// K(c) the total weighted degree of c. Exactly label-invariant: labels are
// canonicalized before accumulation.
double modularity(const EntityGraph& graph, const std::vector<int>& assignment, double gamma);

// Hierarchical Leiden: repeated (fast local moves, randomized refinement,
// aggregation over the refined partition with the unrefined partition as the
// initial assignment) until quality stops improving or max_levels passes ran.
// The per-pass partitions, reversed, form the hierarchy from root to leaves.
// All randomness comes from cfg.seed: identical inputs give identical
// hierarchies.
CommunityHierarchy detect_communities(const EntityGraph& graph, const LeidenConfig& cfg);

struct CommunityRef {
    int level = 0;
    int id = 0;
};

struct ProjectedLevel {
    int requested_level = 0;
    int effective_level = 0;
    std::vector<CommunityRef> communities;
    std::vector<int> assignment; // node -> index into `communities`
};

// The partition used by query condition C<requested_level>: communities that
// exist at that depth, with unsplit ancestors projected down. Requests beyond
// the deepest level return the deepest.
ProjectedLevel project_level(const CommunityHierarchy& hierarchy, int requested_level);

} // namespace graphsense

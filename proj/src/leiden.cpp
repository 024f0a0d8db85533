#include "graphsense/graph/leiden.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "graphsense/errors.hpp"
#include "graphsense/util/rng.hpp"

namespace graphsense {

namespace {

// Aggregatable working graph. Self-loops carry the internal weight of
// collapsed communities; a self-loop of weight w contributes w to the total
// weight m and 2w to its node's strength.
struct WorkGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
    std::vector<double> self_loop;
    std::vector<double> strength;
    double m = 0.0;
};

WorkGraph from_entity_graph(const EntityGraph& graph) {
    WorkGraph g;
    g.n = graph.node_count();
    g.adj.assign(g.n, {});
    g.self_loop.assign(g.n, 0.0);
    g.strength.assign(g.n, 0.0);
    for (const auto& e : graph.edges) {
        g.adj[e.source].push_back({e.target, e.weight});
        g.adj[e.target].push_back({e.source, e.weight});
        g.strength[e.source] += e.weight;
        g.strength[e.target] += e.weight;
        g.m += e.weight;
    }
    return g;
}

double work_modularity(const WorkGraph& g, const std::vector<int>& assignment, double gamma) {
    int max_c = 0;
    for (int c : assignment) max_c = std::max(max_c, c);
    std::vector<double> w_in(static_cast<std::size_t>(max_c) + 1, 0.0);
    std::vector<double> k_tot(static_cast<std::size_t>(max_c) + 1, 0.0);
    for (std::size_t v = 0; v < g.n; ++v) {
        k_tot[assignment[v]] += g.strength[v];
        w_in[assignment[v]] += g.self_loop[v];
        for (const auto& [u, w] : g.adj[v]) {
            if (u > v && assignment[u] == assignment[v]) w_in[assignment[v]] += w;
        }
    }
    const double two_m = 2.0 * g.m;
    double q = 0.0;
    for (std::size_t c = 0; c < w_in.size(); ++c) {
        if (k_tot[c] == 0.0 && w_in[c] == 0.0) continue;
        const double frac = k_tot[c] / two_m;
        q += w_in[c] / g.m - gamma * frac * frac;
    }
    return q;
}

// Gain of moving v (strength k_v) out of a community holding rest-strength
// k_rest (excluding v) with k_v_to_rest edge weight to it, into a community
// of strength k_dst with k_v_to_dst edge weight to it.
inline double move_gain(double k_v, double k_v_to_rest, double k_rest, double k_v_to_dst,
                        double k_dst, double gamma, double m) {
    return (k_v_to_dst - k_v_to_rest) / m -
           (gamma * (k_v * (k_dst - k_rest))) / (2.0 * m * m);
}

// Fast local moves with a processing queue. Nodes start in `assignment`
// (dense ids in [0, n)); moves re-enqueue neighbors of the moved node.
// Returns true when at least one move happened.
bool local_move(const WorkGraph& g, std::vector<int>& assignment, double gamma, Rng& rng) {
    const std::size_t n = g.n;
    std::vector<double> comm_strength(n, 0.0);
    std::vector<int> comm_size(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        comm_strength[assignment[v]] += g.strength[v];
        comm_size[assignment[v]] += 1;
    }
    std::vector<int> free_ids;
    for (std::size_t c = 0; c < n; ++c) {
        if (comm_size[c] == 0) free_ids.push_back(static_cast<int>(c));
    }
    // Lowest free id last, so pop_back hands out ids deterministically.
    std::sort(free_ids.rbegin(), free_ids.rend());

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::deque<std::uint32_t> queue(order.begin(), order.end());
    std::vector<char> queued(n, 1);

    // Scratch: edge weight from v to each touched community.
    std::vector<double> weight_to(n, 0.0);
    std::vector<int> touched;

    bool moved_any = false;
    while (!queue.empty()) {
        const std::uint32_t v = queue.front();
        queue.pop_front();
        queued[v] = 0;

        const int current = assignment[v];
        touched.clear();
        for (const auto& [u, w] : g.adj[v]) {
            const int c = assignment[u];
            if (weight_to[c] == 0.0) touched.push_back(c);
            weight_to[c] += w;
        }

        const double k_v = g.strength[v];
        const double k_rest = comm_strength[current] - k_v;
        const double k_v_to_rest = weight_to[current];

        int best = current;
        double best_gain = 0.0;
        for (int c : touched) {
            if (c == current) continue;
            const double gain =
                move_gain(k_v, k_v_to_rest, k_rest, weight_to[c], comm_strength[c], gamma, g.m);
            if (gain > best_gain + 1e-15 ||
                (gain > best_gain - 1e-15 && gain > 0.0 && c < best)) {
                best = c;
                best_gain = gain;
            }
        }
        // A fresh singleton community is also a candidate.
        if (comm_size[current] > 1 && !free_ids.empty()) {
            const double gain = move_gain(k_v, k_v_to_rest, k_rest, 0.0, 0.0, gamma, g.m);
            if (gain > best_gain + 1e-15) {
                best = free_ids.back();
                best_gain = gain;
            }
        }

        for (int c : touched) weight_to[c] = 0.0;

        if (best == current || best_gain <= 0.0) continue;

        if (comm_size[best] == 0) free_ids.pop_back();
        comm_strength[current] -= k_v;
        comm_size[current] -= 1;
        if (comm_size[current] == 0) {
            free_ids.push_back(current);
            std::sort(free_ids.rbegin(), free_ids.rend());
        }
        comm_strength[best] += k_v;
        comm_size[best] += 1;
        assignment[v] = best;
        moved_any = true;

        for (const auto& [u, w] : g.adj[v]) {
            if (assignment[u] != best && !queued[u]) {
                queue.push_back(u);
                queued[u] = 1;
            }
        }
    }
    return moved_any;
}

// Refinement: within each community of `partition`, nodes are re-merged from
// singletons into sub-communities. Only currently-singleton, well-connected
// nodes move; the target is drawn among positive-gain, well-connected
// sub-communities with probability proportional to exp(gain / theta).
std::vector<int> refine(const WorkGraph& g, const std::vector<int>& partition, double gamma,
                        double theta, Rng& rng) {
    const std::size_t n = g.n;
    std::vector<int> refined(n);
    std::iota(refined.begin(), refined.end(), 0);

    std::vector<double> ref_strength(g.strength);
    std::vector<double> ref_within(n, 0.0);   // edge weight internal to the sub-community
    std::vector<double> ref_k_in_comm(n, 0.0); // sum over members of k_within_parent
    std::vector<int> ref_size(n, 1);

    // Per parent community: member lists, strength totals, per-node weight to
    // the rest of the community.
    std::vector<std::vector<std::uint32_t>> members(n);
    std::vector<double> comm_strength(n, 0.0);
    std::vector<double> k_within(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        members[partition[v]].push_back(static_cast<std::uint32_t>(v));
        comm_strength[partition[v]] += g.strength[v];
    }
    for (std::size_t v = 0; v < n; ++v) {
        for (const auto& [u, w] : g.adj[v]) {
            if (partition[u] == partition[v]) k_within[v] += w;
        }
        ref_k_in_comm[v] = k_within[v];
    }

    const double two_m = 2.0 * g.m;
    std::vector<double> weight_to(n, 0.0);
    std::vector<int> touched;
    std::vector<int> candidates;
    std::vector<double> gains;

    for (std::size_t c = 0; c < n; ++c) {
        if (members[c].size() < 2) continue;
        const double k_c = comm_strength[c];

        std::vector<std::uint32_t> order = members[c];
        rng.shuffle(order);

        for (std::uint32_t v : order) {
            if (ref_size[refined[v]] != 1) continue; // only singletons merge
            const double k_v = g.strength[v];
            // Node well-connectedness within its parent community.
            if (k_within[v] < gamma * k_v * (k_c - k_v) / two_m) continue;

            touched.clear();
            for (const auto& [u, w] : g.adj[v]) {
                if (partition[u] != static_cast<int>(c) || u == v) continue;
                const int s = refined[u];
                if (weight_to[s] == 0.0) touched.push_back(s);
                weight_to[s] += w;
            }

            candidates.clear();
            gains.clear();
            double max_gain = 0.0;
            for (int s : touched) {
                if (s == refined[v]) continue;
                // Sub-community well-connectedness within the parent.
                const double k_s = ref_strength[s];
                const double boundary = ref_k_in_comm[s] - 2.0 * ref_within[s];
                if (boundary < gamma * k_s * (k_c - k_s) / two_m) continue;
                const double gain = move_gain(k_v, 0.0, 0.0, weight_to[s], k_s, gamma, g.m);
                if (gain <= 0.0) continue;
                candidates.push_back(s);
                gains.push_back(gain);
                max_gain = std::max(max_gain, gain);
            }

            if (!candidates.empty()) {
                double total = 0.0;
                for (double& gain : gains) {
                    gain = std::exp((gain - max_gain) / theta);
                    total += gain;
                }
                double draw = rng.unit() * total;
                std::size_t pick = 0;
                for (; pick + 1 < gains.size(); ++pick) {
                    if (draw < gains[pick]) break;
                    draw -= gains[pick];
                }
                const int target = candidates[pick];
                ref_strength[target] += k_v;
                ref_within[target] += weight_to[target] + g.self_loop[v];
                ref_k_in_comm[target] += k_within[v];
                ref_size[target] += 1;
                ref_size[refined[v]] -= 1;
                refined[v] = target;
            }

            for (int s : touched) weight_to[s] = 0.0;
        }
    }
    return refined;
}

// Collapses the refined partition into a smaller work graph. Returns the
// dense refined-community id of each node in `dense` and the new graph.
WorkGraph aggregate(const WorkGraph& g, const std::vector<int>& refined,
                    std::vector<int>& dense) {
    std::vector<int> remap(g.n, -1);
    dense.assign(g.n, -1);
    std::size_t next = 0;
    for (std::size_t v = 0; v < g.n; ++v) {
        if (remap[refined[v]] < 0) remap[refined[v]] = static_cast<int>(next++);
        dense[v] = remap[refined[v]];
    }

    WorkGraph out;
    out.n = next;
    out.adj.assign(next, {});
    out.self_loop.assign(next, 0.0);
    out.strength.assign(next, 0.0);
    out.m = g.m;

    std::map<std::pair<int, int>, double> edges;
    for (std::size_t v = 0; v < g.n; ++v) {
        const int a = dense[v];
        out.self_loop[a] += g.self_loop[v];
        for (const auto& [u, w] : g.adj[v]) {
            if (u <= v) continue;
            const int b = dense[u];
            if (a == b) {
                out.self_loop[a] += w;
            } else {
                edges[{std::min(a, b), std::max(a, b)}] += w;
            }
        }
    }
    for (const auto& [key, w] : edges) {
        out.adj[key.first].push_back({static_cast<std::uint32_t>(key.second), w});
        out.adj[key.second].push_back({static_cast<std::uint32_t>(key.first), w});
        out.strength[key.first] += w;
        out.strength[key.second] += w;
    }
    for (std::size_t v = 0; v < next; ++v) out.strength[v] += 2.0 * out.self_loop[v];
    return out;
}

// Builds dense community cells from an assignment, ordered by smallest
// member node id (node ids are sorted by entity key, so this is the
// (level, min node key) order).
std::vector<std::vector<std::uint32_t>> cells_of(const std::vector<int>& assignment) {
    std::map<int, std::vector<std::uint32_t>> by_label;
    for (std::size_t v = 0; v < assignment.size(); ++v) {
        by_label[assignment[v]].push_back(static_cast<std::uint32_t>(v));
    }
    std::vector<std::vector<std::uint32_t>> cells;
    cells.reserve(by_label.size());
    for (auto& [label, nodes] : by_label) cells.push_back(std::move(nodes));
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return cells;
}

} // namespace

double modularity(const EntityGraph& graph, const std::vector<int>& assignment, double gamma) {
    if (graph.node_count() == 0) throw EmptyGraph("modularity of an empty graph");
    if (assignment.size() != graph.node_count()) {
        throw InvalidConfig("partition size does not match graph");
    }
    const double m = graph.total_edge_weight();
    if (m <= 0.0) throw EmptyGraph("modularity needs positive total edge weight");

    // Canonicalize labels by first appearance so the accumulation order (and
    // therefore the floating-point result) is identical for relabeled inputs.
    std::vector<int> canonical(assignment.size(), -1);
    std::map<int, int> remap;
    int next = 0;
    for (std::size_t v = 0; v < assignment.size(); ++v) {
        auto [it, inserted] = remap.try_emplace(assignment[v], next);
        if (inserted) ++next;
        canonical[v] = it->second;
    }

    std::vector<double> w_in(static_cast<std::size_t>(next), 0.0);
    std::vector<double> k_tot(static_cast<std::size_t>(next), 0.0);
    for (const auto& e : graph.edges) {
        if (canonical[e.source] == canonical[e.target]) w_in[canonical[e.source]] += e.weight;
        k_tot[canonical[e.source]] += e.weight;
        k_tot[canonical[e.target]] += e.weight;
    }
    const double two_m = 2.0 * m;
    double q = 0.0;
    for (int c = 0; c < next; ++c) {
        const double frac = k_tot[c] / two_m;
        q += w_in[c] / m - gamma * frac * frac;
    }
    return q;
}

namespace {

// One full multi-pass run. Returns pass partitions over original nodes,
// finest first.
std::vector<std::vector<int>> run_passes(const WorkGraph& original, std::size_t n_orig,
                                         const LeidenConfig& cfg, Rng& rng) {
    std::vector<std::vector<int>> passes;
    WorkGraph g = original;
    std::vector<std::vector<std::uint32_t>> members(g.n);
    for (std::size_t v = 0; v < g.n; ++v) members[v] = {static_cast<std::uint32_t>(v)};

    std::vector<int> assignment(g.n);
    std::iota(assignment.begin(), assignment.end(), 0);
    double previous_q = -2.0;

    while (true) {
        local_move(g, assignment, cfg.resolution, rng);
        const double q = work_modularity(g, assignment, cfg.resolution);
        if (!passes.empty() && q <= previous_q + cfg.min_improvement) break;
        previous_q = q;

        std::vector<int> over_original(n_orig);
        for (std::size_t v = 0; v < g.n; ++v) {
            for (std::uint32_t orig : members[v]) over_original[orig] = assignment[v];
        }
        passes.push_back(std::move(over_original));
        if (passes.size() >= cfg.max_levels) break;

        std::size_t distinct = 0;
        {
            std::vector<char> seen(g.n, 0);
            for (int c : assignment) {
                if (!seen[c]) {
                    seen[c] = 1;
                    ++distinct;
                }
            }
        }
        if (distinct <= 1) break;

        std::vector<int> refined = refine(g, assignment, cfg.resolution, cfg.randomness, rng);
        std::vector<int> dense;
        WorkGraph aggregated = aggregate(g, refined, dense);
        if (aggregated.n == g.n) break; // nothing collapsed; no further coarsening

        std::vector<std::vector<std::uint32_t>> new_members(aggregated.n);
        std::vector<int> new_assignment(aggregated.n, -1);
        for (std::size_t v = 0; v < g.n; ++v) {
            auto& bucket = new_members[dense[v]];
            bucket.insert(bucket.end(), members[v].begin(), members[v].end());
            new_assignment[dense[v]] = assignment[v];
        }
        // Carry the unrefined partition as the initial assignment,
        // re-densified to [0, n) ids.
        {
            std::map<int, int> remap;
            int next = 0;
            for (auto& c : new_assignment) {
                auto [it, inserted] = remap.try_emplace(c, next);
                if (inserted) ++next;
                c = it->second;
            }
        }
        g = std::move(aggregated);
        members = std::move(new_members);
        assignment = std::move(new_assignment);
    }
    return passes;
}

} // namespace

CommunityHierarchy detect_communities(const EntityGraph& graph, const LeidenConfig& cfg) {
    if (graph.node_count() == 0) throw EmptyGraph("cannot detect communities of an empty graph");
    if (cfg.resolution <= 0.0 || cfg.randomness <= 0.0 || cfg.max_levels == 0 ||
        cfg.restarts == 0) {
        throw InvalidConfig("leiden: resolution, randomness, max_levels and restarts must be positive");
    }

    const std::size_t n_orig = graph.node_count();
    Rng rng(cfg.seed);

    // Pass partitions expressed over original nodes, finest first.
    std::vector<std::vector<int>> passes;

    if (graph.edge_count() == 0) {
        // No edges: every node is its own community, single level.
        std::vector<int> singleton(n_orig);
        std::iota(singleton.begin(), singleton.end(), 0);
        passes.push_back(std::move(singleton));
    } else {
        const WorkGraph g = from_entity_graph(graph);
        // Tiny graphs have strong single-move attractors (balanced pairs on
        // paths) that aggregation cannot escape; extra restarts are nearly
        // free there and keep the leaf partition at the optimum.
        const std::size_t restarts = g.n <= 32 ? std::max<std::size_t>(cfg.restarts, 64)
                                               : cfg.restarts;
        double best_leaf_q = -2.0;
        double best_final_q = -2.0;
        for (std::size_t restart = 0; restart < restarts; ++restart) {
            auto candidate = run_passes(g, n_orig, cfg, rng);
            const double leaf_q = work_modularity(g, candidate.front(), cfg.resolution);
            const double final_q = work_modularity(g, candidate.back(), cfg.resolution);
            if (leaf_q > best_leaf_q ||
                (leaf_q == best_leaf_q && final_q > best_final_q)) {
                best_leaf_q = leaf_q;
                best_final_q = final_q;
                passes = std::move(candidate);
            }
        }
    }

    // Reverse passes (coarsest becomes level 0) and enforce nesting: each
    // deeper level is intersected with its parent level, so a community split
    // by a later pass still yields a tree. Where no split happened the
    // intersection is a no-op.
    CommunityHierarchy hierarchy;
    std::reverse(passes.begin(), passes.end());

    std::vector<int> parent_assignment; // dense ids of the previous level
    for (std::size_t level = 0; level < passes.size(); ++level) {
        std::vector<int> combined(n_orig);
        if (level == 0) {
            combined = passes[0];
        } else {
            // Pair (parent cell, pass label) -> new cell.
            std::map<std::pair<int, int>, int> pair_ids;
            for (std::size_t v = 0; v < n_orig; ++v) {
                auto key = std::make_pair(parent_assignment[v], passes[level][v]);
                auto [it, inserted] = pair_ids.try_emplace(key, static_cast<int>(pair_ids.size()));
                combined[v] = it->second;
            }
        }

        auto cells = cells_of(combined);
        // Skip duplicate levels entirely (identical partition as parent).
        if (level > 0) {
            auto parent_cells = cells_of(parent_assignment);
            if (parent_cells == cells) continue;
        }

        std::vector<int> dense(n_orig, -1);
        std::vector<Community> communities;
        const int level_index = hierarchy.num_levels();
        for (std::size_t id = 0; id < cells.size(); ++id) {
            Community c;
            c.level = level_index;
            c.id = static_cast<int>(id);
            c.nodes = cells[id];
            for (std::uint32_t v : c.nodes) dense[v] = c.id;
            if (level_index > 0) {
                c.parent_id = hierarchy.assignments[level_index - 1][c.nodes.front()];
                const auto& parent =
                    hierarchy.levels[level_index - 1][static_cast<std::size_t>(c.parent_id)];
                c.same_as_parent = parent.nodes == c.nodes;
            }
            communities.push_back(std::move(c));
        }
        hierarchy.levels.push_back(std::move(communities));
        hierarchy.assignments.push_back(dense);
        parent_assignment = std::move(dense);
    }

    return hierarchy;
}

ProjectedLevel project_level(const CommunityHierarchy& hierarchy, int requested_level) {
    if (hierarchy.num_levels() == 0) throw EmptyGraph("hierarchy has no levels");
    ProjectedLevel out;
    out.requested_level = std::max(0, requested_level);
    out.effective_level = std::min(out.requested_level, hierarchy.deepest_level());

    const auto& level = hierarchy.levels[static_cast<std::size_t>(out.effective_level)];
    out.assignment = hierarchy.assignments[static_cast<std::size_t>(out.effective_level)];
    out.communities.reserve(level.size());
    for (const auto& c : level) out.communities.push_back({c.level, c.id});
    return out;
}

} // namespace graphsense

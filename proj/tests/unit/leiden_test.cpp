#include <doctest.h>

#include <cmath>
#include <set>

#include "../support/test_support.hpp"
#include "graphsense/graph/leiden.hpp"

using namespace graphsense;
using namespace graphsense::test;

namespace {

// Every node in exactly one community, at every level, and levels nest.
void check_hierarchy_invariants(const CommunityHierarchy& h, std::size_t n) {
    REQUIRE(h.num_levels() >= 1);
    for (int level = 0; level < h.num_levels(); ++level) {
        std::vector<int> seen(n, 0);
        for (const auto& c : h.levels[static_cast<std::size_t>(level)]) {
            CHECK(!c.nodes.empty());
            for (auto v : c.nodes) {
                REQUIRE(v < n);
                seen[v] += 1;
            }
            if (level == 0) {
                CHECK(c.parent_id == -1);
            } else {
                const auto& parent =
                    h.levels[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(c.parent_id)];
                std::set<std::uint32_t> parent_nodes(parent.nodes.begin(), parent.nodes.end());
                for (auto v : c.nodes) CHECK(parent_nodes.count(v) == 1);
            }
        }
        for (std::size_t v = 0; v < n; ++v) CHECK(seen[v] == 1); // MECE
    }
}

std::vector<int> leaf_assignment(const CommunityHierarchy& h) {
    return h.assignments.back();
}

} // namespace

TEST_CASE("modularity identities") {
    auto two_k3 = make_graph(
        6, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});

    SUBCASE("two disjoint triangles split by component: Q = 0.5") {
        std::vector<int> split = {0, 0, 0, 1, 1, 1};
        CHECK(modularity(two_k3, split, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
        // Matches the independently coded oracle.
        CHECK(modularity(two_k3, split, 1.0) ==
              doctest::Approx(oracle_modularity(two_k3, split, 1.0)).epsilon(1e-12));
    }

    SUBCASE("single community gives exactly 1 - gamma") {
        std::vector<int> one = {7, 7, 7, 7, 7, 7};
        CHECK(std::abs(modularity(two_k3, one, 1.0) - 0.0) <= 1e-12);
        CHECK(std::abs(modularity(two_k3, one, 0.25) - 0.75) <= 1e-12);
    }

    SUBCASE("relabeling communities leaves Q bit-identical") {
        std::vector<int> a = {0, 0, 1, 1, 2, 2};
        std::vector<int> b = {5, 5, 9, 9, 1, 1};
        CHECK(modularity(two_k3, a, 1.0) == modularity(two_k3, b, 1.0));
    }

    SUBCASE("empty graph errors") {
        EntityGraph empty;
        std::vector<int> none;
        CHECK_THROWS_AS(modularity(empty, none, 1.0), EmptyGraph);
    }
}

TEST_CASE("single node gives one level, one community") {
    auto g = make_graph(1, std::vector<std::pair<int, int>>{});
    LeidenConfig cfg;
    auto h = detect_communities(g, cfg);
    CHECK(h.num_levels() == 1);
    CHECK(h.levels[0].size() == 1);
    check_hierarchy_invariants(h, 1);
}

TEST_CASE("barbell K3-K3 reaches the exact optimum: the two cliques") {
    auto g = barbell_k3();
    LeidenConfig cfg;
    cfg.seed = 5;
    auto h = detect_communities(g, cfg);
    check_hierarchy_invariants(h, 6);

    auto best = best_partition(g, 1.0);
    const auto leaf = leaf_assignment(h);
    CHECK(modularity(g, leaf, 1.0) == doctest::Approx(best.q).epsilon(1e-12));
    CHECK(canonical_groups(leaf) == canonical_groups(best.labels));
}

TEST_CASE("clique ring of four K5s separates the cliques exactly") {
    auto g = clique_ring(4, 5);
    LeidenConfig cfg;
    cfg.seed = 11;
    auto h = detect_communities(g, cfg);
    check_hierarchy_invariants(h, 20);

    // The known optimum at gamma=1 groups each K5.
    std::vector<int> cliques(20);
    for (int v = 0; v < 20; ++v) cliques[v] = v / 5;
    const auto leaf = leaf_assignment(h);
    CHECK(canonical_groups(leaf) == canonical_groups(cliques));
    CHECK(modularity(g, leaf, 1.0) >= modularity(g, cliques, 1.0) - 1e-12);
}

TEST_CASE("leiden stays within 5 percent of the exhaustive optimum on small graphs") {
    std::vector<std::pair<std::string, EntityGraph>> fixtures;
    fixtures.emplace_back("barbell", barbell_k3());
    // paths P2..P8
    for (int n = 2; n <= 8; ++n) {
        std::vector<std::pair<int, int>> edges;
        for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
        fixtures.emplace_back("path" + std::to_string(n), make_graph(n, edges));
    }
    // cycles C3..C8
    for (int n = 3; n <= 8; ++n) {
        std::vector<std::pair<int, int>> edges;
        for (int v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n});
        fixtures.emplace_back("cycle" + std::to_string(n), make_graph(n, edges));
    }
    // stars S3..S7
    for (int n = 4; n <= 8; ++n) {
        std::vector<std::pair<int, int>> edges;
        for (int v = 1; v < n; ++v) edges.push_back({0, v});
        fixtures.emplace_back("star" + std::to_string(n), make_graph(n, edges));
    }
    // complete K3..K8
    for (int n = 3; n <= 8; ++n) {
        std::vector<std::pair<int, int>> edges;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) edges.push_back({a, b});
        }
        fixtures.emplace_back("complete" + std::to_string(n), make_graph(n, edges));
    }

    REQUIRE(fixtures.size() >= 25);
    for (const auto& [name, graph] : fixtures) {
        CAPTURE(name);
        auto best = best_partition(graph, 1.0);
        LeidenConfig cfg;
        cfg.seed = 3;
        auto h = detect_communities(graph, cfg);
        check_hierarchy_invariants(h, graph.node_count());
        const double q = modularity(graph, leaf_assignment(h), 1.0);
        if (best.q > 0.0) {
            CHECK(q >= 0.95 * best.q - 1e-12);
        } else {
            CHECK(q >= best.q - 1e-9);
        }
    }
}

TEST_CASE("quality dominates the trivial partitions on every fixture") {
    std::vector<EntityGraph> graphs;
    graphs.push_back(barbell_k3());
    graphs.push_back(clique_ring(3, 4));
    Rng rng(13);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t n = 5 + rng.bounded(4);
        std::vector<std::pair<int, int>> edges;
        for (std::size_t v = 1; v < n; ++v) {
            edges.push_back({static_cast<int>(rng.bounded(v)), static_cast<int>(v)});
        }
        for (int extra = 0; extra < 4; ++extra) {
            int a = static_cast<int>(rng.bounded(n));
            int b = static_cast<int>(rng.bounded(n));
            if (a != b) edges.push_back({std::min(a, b), std::max(a, b)});
        }
        std::set<std::pair<int, int>> dedup(edges.begin(), edges.end());
        graphs.push_back(make_graph(n, std::vector<std::pair<int, int>>(dedup.begin(), dedup.end())));
    }

    for (const auto& g : graphs) {
        LeidenConfig cfg;
        auto h = detect_communities(g, cfg);
        std::vector<int> singles(g.node_count());
        for (std::size_t v = 0; v < g.node_count(); ++v) singles[v] = static_cast<int>(v);
        std::vector<int> one(g.node_count(), 0);

        // Leaf dominates singletons; quality grows monotonically toward the
        // root; the converged root dominates the all-in-one partition.
        const double leaf_q = modularity(g, leaf_assignment(h), 1.0);
        CHECK(leaf_q >= modularity(g, singles, 1.0) - 1e-12);
        double previous = leaf_q;
        for (int level = h.num_levels() - 2; level >= 0; --level) {
            const double q = modularity(g, h.assignments[static_cast<std::size_t>(level)], 1.0);
            CHECK(q >= previous - 1e-12);
            previous = q;
        }
        CHECK(previous >= modularity(g, one, 1.0) - 1e-12);
    }
}

TEST_CASE("on the curated families even the leaf dominates both trivial partitions") {
    std::vector<EntityGraph> graphs;
    graphs.push_back(barbell_k3());
    graphs.push_back(clique_ring(4, 5));
    graphs.push_back(clique_ring(3, 4));
    for (int n = 4; n <= 8; ++n) { // stars
        std::vector<std::pair<int, int>> edges;
        for (int v = 1; v < n; ++v) edges.push_back({0, v});
        graphs.push_back(make_graph(n, edges));
    }
    for (const auto& g : graphs) {
        LeidenConfig cfg;
        auto h = detect_communities(g, cfg);
        std::vector<int> one(g.node_count(), 0);
        const double leaf_q = modularity(g, leaf_assignment(h), 1.0);
        CHECK(leaf_q >= modularity(g, one, 1.0) - 1e-12);
    }
}

TEST_CASE("identical seeds give identical hierarchies, different seeds may differ") {
    auto g = clique_ring(4, 5);
    LeidenConfig cfg;
    cfg.seed = 123;
    auto h1 = detect_communities(g, cfg);
    auto h2 = detect_communities(g, cfg);
    REQUIRE(h1.num_levels() == h2.num_levels());
    for (int level = 0; level < h1.num_levels(); ++level) {
        CHECK(h1.assignments[static_cast<std::size_t>(level)] ==
              h2.assignments[static_cast<std::size_t>(level)]);
    }
}

TEST_CASE("partition is invariant under uniform weight scaling") {
    auto base = clique_ring(4, 5);
    LeidenConfig cfg;
    cfg.seed = 21;
    auto reference = detect_communities(base, cfg);

    for (double scale : {0.5, 2.0, 10.0}) {
        auto scaled = base;
        for (auto& e : scaled.edges) e.weight *= scale;
        auto h = detect_communities(scaled, cfg);
        REQUIRE(h.num_levels() == reference.num_levels());
        for (int level = 0; level < h.num_levels(); ++level) {
            CHECK(h.assignments[static_cast<std::size_t>(level)] ==
                  reference.assignments[static_cast<std::size_t>(level)]);
        }
    }
}

TEST_CASE("edgeless graphs form singleton communities") {
    auto g = make_graph(4, std::vector<std::pair<int, int>>{});
    LeidenConfig cfg;
    auto h = detect_communities(g, cfg);
    CHECK(h.num_levels() == 1);
    CHECK(h.levels[0].size() == 4);
    check_hierarchy_invariants(h, 4);
}

TEST_CASE("project_level follows the documented projection rules") {
    auto g = clique_ring(4, 5);
    LeidenConfig cfg;
    cfg.seed = 2;
    auto h = detect_communities(g, cfg);

    SUBCASE("level 0 is the root partition unchanged") {
        auto p = project_level(h, 0);
        CHECK(p.effective_level == 0);
        CHECK(p.communities.size() == h.levels[0].size());
        CHECK(p.assignment == h.assignments[0]);
    }

    SUBCASE("levels beyond the deepest project the deepest") {
        auto deepest = project_level(h, h.deepest_level());
        auto beyond = project_level(h, 99);
        CHECK(beyond.effective_level == h.deepest_level());
        CHECK(beyond.assignment == deepest.assignment);
    }

    SUBCASE("single-level hierarchy projects level 3 to level 0") {
        auto single = make_graph(2, std::vector<std::pair<int, int>>{{0, 1}});
        auto sh = detect_communities(single, cfg);
        REQUIRE(sh.num_levels() == 1);
        auto p = project_level(sh, 3);
        CHECK(p.effective_level == 0);
        CHECK(p.communities.size() == sh.levels[0].size());
    }

    SUBCASE("every projected level is MECE") {
        for (int level = 0; level < 6; ++level) {
            auto p = project_level(h, level);
            std::vector<int> seen(g.node_count(), 0);
            for (std::size_t v = 0; v < g.node_count(); ++v) {
                REQUIRE(p.assignment[v] >= 0);
                REQUIRE(p.assignment[v] < static_cast<int>(p.communities.size()));
                seen[v] = 1;
            }
            for (int s : seen) CHECK(s == 1);
        }
    }
}

TEST_CASE("split communities subdivide their parents (unsplit ones carry down)") {
    // Two dense cliques bridged weakly, plus a far satellite pair: the
    // hierarchy should keep nesting valid whatever the pass structure did.
    std::vector<std::pair<int, int>> edges;
    auto add_clique = [&](int base, int size) {
        for (int i = 0; i < size; ++i) {
            for (int j = i + 1; j < size; ++j) edges.push_back({base + i, base + j});
        }
    };
    add_clique(0, 4);
    add_clique(4, 4);
    edges.push_back({3, 4});
    edges.push_back({8, 9});
    auto g = make_graph(10, edges);
    LeidenConfig cfg;
    cfg.seed = 8;
    auto h = detect_communities(g, cfg);
    check_hierarchy_invariants(h, 10);
    for (int level = 1; level < h.num_levels(); ++level) {
        for (const auto& c : h.levels[static_cast<std::size_t>(level)]) {
            const auto& parent =
                h.levels[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(c.parent_id)];
            if (c.same_as_parent) {
                CHECK(parent.nodes == c.nodes);
            } else {
                CHECK(c.nodes.size() <= parent.nodes.size());
            }
        }
    }
}

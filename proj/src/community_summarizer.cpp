#include "graphsense/community/summarizer.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "graphsense/util/parallel.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

namespace {

struct ElementLookup {
    std::map<EntityKey, std::size_t> entity_of;
    std::map<std::pair<EntityKey, EntityKey>, std::size_t> relationship_of;
    std::map<EntityKey, std::vector<std::size_t>> claims_of;

    explicit ElementLookup(const ElementSummaries& elements) {
        for (std::size_t i = 0; i < elements.entities.size(); ++i) {
            entity_of[elements.entities[i].key] = i;
        }
        for (std::size_t i = 0; i < elements.relationships.size(); ++i) {
            const auto& r = elements.relationships[i];
            relationship_of[{r.source, r.target}] = i;
        }
        for (std::size_t i = 0; i < elements.claims.size(); ++i) {
            claims_of[elements.claims[i].subject].push_back(i);
        }
    }
};

PackedItem entity_item(const EntitySummary& s, const TokenCodec& codec) {
    PackedItem item;
    item.id = "entity:" + s.key.to_string();
    item.text = "ENTITY " + s.display_name +
                (s.key.type.empty() ? "" : " (" + s.key.type + ")") + ": " + s.description;
    item.tokens = codec.count(item.text);
    return item;
}

PackedItem claim_item(const ClaimSummary& s, std::size_t index, const TokenCodec& codec) {
    PackedItem item;
    item.id = "claim:" + s.subject.to_string() + "#" + std::to_string(index);
    item.text = "CLAIM about " + s.subject.normalized_name +
                (s.type.empty() ? "" : " [" + s.type + "]") + ": " + s.description;
    item.tokens = codec.count(item.text);
    return item;
}

PackedItem edge_item(const RelationshipSummary& s, const TokenCodec& codec) {
    PackedItem item;
    item.id = "edge:" + s.source.to_string() + "&" + s.target.to_string();
    item.text = "RELATION " + s.source.normalized_name + " -- " + s.target.normalized_name +
                ": " + s.description;
    item.tokens = codec.count(item.text);
    return item;
}

PackedItem report_item(const CommunitySummary& summary, const TokenCodec& codec) {
    PackedItem item;
    item.id = "report:L" + std::to_string(summary.level) + ".C" +
              std::to_string(summary.community_id);
    item.text = "REPORT " + summary.title + ": " + summary.body;
    item.tokens = codec.count(item.text);
    return item;
}

// The full prioritized candidate list for a community, duplicates removed in
// priority order. Appends, per in-community edge (decreasing combined degree,
// ties by endpoint keys): source node, target node, claims of both endpoints,
// the edge itself; then edgeless nodes by decreasing degree with their claims.
std::vector<PackedItem> leaf_candidates(const Community& community,
                                        const EntityGraph& graph,
                                        const ElementSummaries& elements,
                                        const ElementLookup& lookup,
                                        const TokenCodec& codec,
                                        // optional out: item index -> node id it belongs to
                                        std::vector<std::int64_t>* owner_node = nullptr) {
    std::vector<char> in_community(graph.node_count(), 0);
    for (std::uint32_t v : community.nodes) in_community[v] = 1;

    std::vector<std::uint32_t> edges;
    for (std::uint32_t v : community.nodes) {
        for (std::uint32_t e : graph.incident[v]) {
            const auto& edge = graph.edges[e];
            if (edge.source == v && in_community[edge.target]) edges.push_back(e);
        }
    }
    std::sort(edges.begin(), edges.end(), [&](std::uint32_t a, std::uint32_t b) {
        const std::size_t da = combined_degree(graph, a);
        const std::size_t db = combined_degree(graph, b);
        if (da != db) return da > db;
        const auto& ea = graph.edges[a];
        const auto& eb = graph.edges[b];
        if (ea.source != eb.source) return ea.source < eb.source;
        return ea.target < eb.target;
    });

    std::vector<PackedItem> items;
    std::vector<std::int64_t> owners;
    std::set<std::string> seen;
    std::vector<char> node_touched(graph.node_count(), 0);

    auto push = [&](PackedItem item, std::int64_t owner) {
        if (!seen.insert(item.id).second) return;
        items.push_back(std::move(item));
        owners.push_back(owner);
    };
    auto push_node_with_claims = [&](std::uint32_t v) {
        const auto& node = graph.nodes[v];
        auto it = lookup.entity_of.find(node.key);
        if (it != lookup.entity_of.end()) {
            push(entity_item(elements.entities[it->second], codec), v);
        }
        auto claims = lookup.claims_of.find(node.key);
        if (claims != lookup.claims_of.end()) {
            for (std::size_t ci : claims->second) {
                push(claim_item(elements.claims[ci], ci, codec), v);
            }
        }
        node_touched[v] = 1;
    };

    for (std::uint32_t e : edges) {
        const auto& edge = graph.edges[e];
        push_node_with_claims(edge.source);
        push_node_with_claims(edge.target);
        auto rel = lookup.relationship_of.find(
            {graph.nodes[edge.source].key, graph.nodes[edge.target].key});
        if (rel != lookup.relationship_of.end()) {
            // An edge belongs to a sub-community only when both endpoints do.
            push(edge_item(elements.relationships[rel->second], codec), -1);
        }
    }

    std::vector<std::uint32_t> rest;
    for (std::uint32_t v : community.nodes) {
        if (!node_touched[v]) rest.push_back(v);
    }
    std::sort(rest.begin(), rest.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (graph.degree(a) != graph.degree(b)) return graph.degree(a) > graph.degree(b);
        return a < b;
    });
    for (std::uint32_t v : rest) push_node_with_claims(v);

    if (owner_node) *owner_node = std::move(owners);
    return items;
}

PackedContext greedy_prefix(const std::vector<PackedItem>& items, std::size_t budget) {
    PackedContext out;
    std::vector<std::string> texts;
    for (const auto& item : items) {
        if (out.token_count + item.tokens > budget) {
            out.truncated = true;
            break;
        }
        out.token_count += item.tokens;
        out.ledger.push_back(item.id);
        texts.push_back(item.text);
    }
    out.text = join(texts, "\n");
    return out;
}

} // namespace

PackedContext pack_leaf_context(const Community& community,
                                const EntityGraph& graph,
                                const ElementSummaries& elements,
                                const PackingBudget& budget,
                                const TokenCodec& codec) {
    ElementLookup lookup(elements);
    auto items = leaf_candidates(community, graph, elements, lookup, codec);
    return greedy_prefix(items, budget.context_limit_tokens);
}

PackedContext pack_hierarchical_context(const Community& community,
                                        const std::vector<Community>& children,
                                        const std::vector<CommunitySummary>& child_summaries,
                                        const EntityGraph& graph,
                                        const ElementSummaries& elements,
                                        const PackingBudget& budget,
                                        const TokenCodec& codec) {
    ElementLookup lookup(elements);
    std::vector<std::int64_t> owner_node;
    auto items = leaf_candidates(community, graph, elements, lookup, codec, &owner_node);

    std::size_t total = 0;
    for (const auto& item : items) total += item.tokens;
    if (total <= budget.context_limit_tokens) {
        return greedy_prefix(items, budget.context_limit_tokens);
    }

    // Which child each item belongs to: node and claim items follow their
    // node; an edge item belongs to a child only when both endpoints sit in
    // it, otherwise it is a cross-child element owned by the parent.
    std::vector<int> child_of_node(graph.node_count(), -1);
    for (std::size_t k = 0; k < children.size(); ++k) {
        for (std::uint32_t v : children[k].nodes) child_of_node[v] = static_cast<int>(k);
    }
    std::vector<int> owner_child(items.size(), -1);
    {
        std::map<std::string, int> edge_child;
        for (std::size_t k = 0; k < children.size(); ++k) {
            std::vector<char> in_child(graph.node_count(), 0);
            for (std::uint32_t v : children[k].nodes) in_child[v] = 1;
            for (std::uint32_t v : children[k].nodes) {
                for (std::uint32_t e : graph.incident[v]) {
                    const auto& edge = graph.edges[e];
                    if (edge.source == v && in_child[edge.target]) {
                        edge_child["edge:" + graph.nodes[edge.source].key.to_string() + "&" +
                                   graph.nodes[edge.target].key.to_string()] =
                            static_cast<int>(k);
                    }
                }
            }
        }
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (owner_node[i] >= 0) {
                owner_child[i] = child_of_node[owner_node[i]];
            } else {
                auto it = edge_child.find(items[i].id);
                owner_child[i] = it == edge_child.end() ? -1 : it->second;
            }
        }
    }

    std::vector<std::size_t> child_tokens(children.size(), 0);
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (owner_child[i] >= 0) child_tokens[owner_child[i]] += items[i].tokens;
    }

    std::vector<std::size_t> rank(children.size());
    for (std::size_t k = 0; k < rank.size(); ++k) rank[k] = k;
    std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
        if (child_tokens[a] != child_tokens[b]) return child_tokens[a] > child_tokens[b];
        return children[a].id < children[b].id;
    });

    std::vector<PackedItem> reports(children.size());
    for (std::size_t k = 0; k < children.size(); ++k) {
        reports[k] = report_item(child_summaries[k], codec);
    }

    std::vector<char> substituted(children.size(), 0);
    std::vector<std::size_t> substitution_order;
    std::size_t running = total;
    for (std::size_t k : rank) {
        if (running <= budget.context_limit_tokens) break;
        const std::size_t next_total = running - child_tokens[k] + reports[k].tokens;
        if (next_total >= running) continue; // substitution must strictly shrink
        substituted[k] = 1;
        substitution_order.push_back(k);
        running = next_total;
    }

    if (running <= budget.context_limit_tokens && !substitution_order.empty()) {
        std::vector<PackedItem> packed;
        for (std::size_t k : substitution_order) packed.push_back(reports[k]);
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (owner_child[i] < 0 || !substituted[owner_child[i]]) packed.push_back(items[i]);
        }
        PackedContext out = greedy_prefix(packed, budget.context_limit_tokens);
        out.substitutions = substitution_order.size();
        return out;
    }

    // Even with every useful substitution the elements do not fit: fall back
    // to the sub-community reports alone, greedy prefix in rank order.
    std::vector<PackedItem> fallback;
    for (std::size_t k : rank) fallback.push_back(reports[k]);
    PackedContext out = greedy_prefix(fallback, budget.context_limit_tokens);
    out.substitutions = children.size();
    out.truncated = true;
    return out;
}

namespace {

std::pair<std::string, std::string> parse_report(const std::string& reply) {
    std::string title;
    std::string body;
    for (const auto& line : split_lines(reply)) {
        std::string t = trim(line);
        if (t.empty()) continue;
        if (title.empty()) {
            while (!t.empty() && (t.front() == '#' || t.front() == '*')) t.erase(t.begin());
            if (to_upper_ascii(t).rfind("TITLE:", 0) == 0) t = t.substr(6);
            title = trim(std::string(strip_quotes(trim_view(t))));
        } else {
            if (!body.empty()) body += "\n";
            body += t;
        }
    }
    if (title.empty()) title = "(untitled community)";
    if (body.empty()) body = title;
    return {title, body};
}

} // namespace

std::vector<std::vector<CommunitySummary>> summarize_all_communities(
    const CommunityHierarchy& hierarchy,
    const EntityGraph& graph,
    const ElementSummaries& elements,
    const PackingBudget& budget,
    const PromptLibrary& prompts,
    LlmGateway& gateway) {
    const int levels = hierarchy.num_levels();
    std::vector<std::vector<CommunitySummary>> out(static_cast<std::size_t>(levels));

    for (int level = levels - 1; level >= 0; --level) {
        const auto& communities = hierarchy.levels[static_cast<std::size_t>(level)];
        auto& summaries = out[static_cast<std::size_t>(level)];
        summaries.resize(communities.size());

        parallel_for(communities.size(), gateway.options().concurrency, [&](std::size_t i) {
            const Community& community = communities[i];
            CommunitySummary summary;
            summary.level = level;
            summary.community_id = community.id;

            std::vector<Community> children;
            std::vector<CommunitySummary> child_summaries;
            if (level + 1 < levels) {
                for (const auto& child : hierarchy.levels[static_cast<std::size_t>(level + 1)]) {
                    if (child.parent_id == community.id) {
                        children.push_back(child);
                        child_summaries.push_back(
                            out[static_cast<std::size_t>(level + 1)][child.id]);
                    }
                }
            }

            // An unsplit community reuses its single child's report verbatim.
            if (children.size() == 1 && children.front().same_as_parent) {
                summary = child_summaries.front();
                summary.level = level;
                summary.community_id = community.id;
                summary.reused_from_child = true;
                summaries[i] = std::move(summary);
                return;
            }

            PackedContext packed =
                children.empty()
                    ? pack_leaf_context(community, graph, elements, budget, gateway.codec())
                    : pack_hierarchical_context(community, children, child_summaries, graph,
                                                elements, budget, gateway.codec());
            summary.context_token_count = packed.token_count;
            summary.inputs_used = packed.ledger;
            summary.truncated_context = packed.truncated;

            try {
                ChatRequest request = ChatRequest::single(
                    prompts.render("community_report",
                                   {{"context", packed.text},
                                    {"max_tokens", std::to_string(budget.summary_limit_tokens)}}),
                    budget.summary_limit_tokens);
                ChatResponse response = gateway.chat(request);
                auto [title, body] = parse_report(response.text);
                summary.title = title;
                summary.body = body;
            } catch (const Error&) {
                summary.degraded = true;
                summary.title = "Community L" + std::to_string(level) + ".C" +
                                std::to_string(community.id);
                summary.body = packed.text.empty() ? "(no context available)" : packed.text;
            }

            // Enforce the summary token budget exactly.
            const auto& codec = gateway.codec();
            std::size_t title_tokens = codec.count(summary.title);
            if (title_tokens >= budget.summary_limit_tokens) {
                summary.title = codec.take_prefix(summary.title, budget.summary_limit_tokens);
                summary.body.clear();
                title_tokens = codec.count(summary.title);
            }
            summary.body =
                codec.take_prefix(summary.body, budget.summary_limit_tokens - title_tokens);
            summary.token_count = title_tokens + codec.count(summary.body);
            summaries[i] = std::move(summary);
        });
    }
    return out;
}

} // namespace graphsense

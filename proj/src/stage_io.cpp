#include "graphsense/workspace/stage_io.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

namespace graphsense {

using nlohmann::json;

namespace {

json key_to_json(const EntityKey& key) {
    return json{{"name", key.normalized_name}, {"type", key.type}};
}

EntityKey key_from_json(const json& j) {
    return EntityKey{j.at("name").get<std::string>(), j.at("type").get<std::string>()};
}

json date_to_json(const std::optional<IsoDate>& date) {
    if (!date) return nullptr;
    return date->to_string();
}

std::optional<IsoDate> date_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return IsoDate::parse(j.get<std::string>());
}

} // namespace

void save_chunks(Workspace& ws, const std::vector<TextChunk>& chunks) {
    std::vector<json> records;
    records.reserve(chunks.size());
    for (const auto& c : chunks) {
        records.push_back({{"id", c.id},
                           {"document_id", c.document_id},
                           {"index", c.index_in_document},
                           {"text", c.text},
                           {"tokens", c.token_count},
                           {"overlap", c.overlap_tokens}});
    }
    ws.save_stage("chunks", records);
}

std::vector<TextChunk> load_chunks(const Workspace& ws) {
    std::vector<TextChunk> chunks;
    for (const auto& r : ws.load_stage("chunks")) {
        TextChunk c;
        c.id = r.at("id").get<std::string>();
        c.document_id = r.at("document_id").get<std::string>();
        c.index_in_document = r.at("index").get<std::size_t>();
        c.text = r.at("text").get<std::string>();
        c.token_count = r.at("tokens").get<std::size_t>();
        c.overlap_tokens = r.at("overlap").get<std::size_t>();
        chunks.push_back(std::move(c));
    }
    return chunks;
}

void save_extraction(Workspace& ws, const std::vector<ExtractionResult>& results) {
    std::vector<json> records;
    records.reserve(results.size());
    for (const auto& result : results) {
        json entities = json::array();
        for (const auto& e : result.entities) {
            entities.push_back({{"name", e.name}, {"type", e.type}, {"desc", e.description}});
        }
        json relationships = json::array();
        for (const auto& r : result.relationships) {
            relationships.push_back(
                {{"source", r.source_name}, {"target", r.target_name}, {"desc", r.description}});
        }
        json claims = json::array();
        for (const auto& c : result.claims) {
            claims.push_back({{"subject", c.subject},
                              {"object", c.object},
                              {"type", c.type},
                              {"desc", c.description},
                              {"span", c.source_span},
                              {"start", date_to_json(c.start_date)},
                              {"end", date_to_json(c.end_date)}});
        }
        records.push_back({{"chunk_id", result.chunk_id},
                           {"chunk_index", result.chunk_index},
                           {"entities", entities},
                           {"relationships", relationships},
                           {"claims", claims},
                           {"gleanings", result.gleaning_rounds_used},
                           {"malformed", result.malformed_records_skipped},
                           {"status", static_cast<int>(result.status)},
                           {"note", result.note}});
    }
    ws.save_stage("extraction", records);
}

std::vector<ExtractionResult> load_extraction(const Workspace& ws) {
    std::vector<ExtractionResult> results;
    for (const auto& r : ws.load_stage("extraction")) {
        ExtractionResult result;
        result.chunk_id = r.at("chunk_id").get<std::string>();
        result.chunk_index = r.at("chunk_index").get<std::size_t>();
        for (const auto& e : r.at("entities")) {
            result.entities.push_back({result.chunk_id, e.at("name").get<std::string>(),
                                       e.at("type").get<std::string>(),
                                       e.at("desc").get<std::string>()});
        }
        for (const auto& rel : r.at("relationships")) {
            result.relationships.push_back({result.chunk_id, rel.at("source").get<std::string>(),
                                            rel.at("target").get<std::string>(),
                                            rel.at("desc").get<std::string>()});
        }
        for (const auto& c : r.at("claims")) {
            ClaimInstance claim;
            claim.chunk_id = result.chunk_id;
            claim.subject = c.at("subject").get<std::string>();
            claim.object = c.at("object").get<std::string>();
            claim.type = c.at("type").get<std::string>();
            claim.description = c.at("desc").get<std::string>();
            claim.source_span = c.at("span").get<std::string>();
            claim.start_date = date_from_json(c.at("start"));
            claim.end_date = date_from_json(c.at("end"));
            result.claims.push_back(std::move(claim));
        }
        result.gleaning_rounds_used = r.at("gleanings").get<int>();
        result.malformed_records_skipped = r.at("malformed").get<int>();
        result.status = static_cast<ExtractionStatus>(r.at("status").get<int>());
        result.note = r.at("note").get<std::string>();
        results.push_back(std::move(result));
    }
    return results;
}

void save_element_summaries(Workspace& ws, const ElementSummaries& elements) {
    std::vector<json> records;
    for (const auto& e : elements.entities) {
        records.push_back({{"kind", "entity"},
                           {"key", key_to_json(e.key)},
                           {"display", e.display_name},
                           {"desc", e.description},
                           {"tokens", e.token_count},
                           {"instances", e.instance_count},
                           {"chunks", e.source_chunk_ids},
                           {"degraded", e.degraded},
                           {"placeholder", e.placeholder}});
    }
    for (const auto& r : elements.relationships) {
        records.push_back({{"kind", "relationship"},
                           {"source", key_to_json(r.source)},
                           {"target", key_to_json(r.target)},
                           {"desc", r.description},
                           {"tokens", r.token_count},
                           {"instances", r.instance_count},
                           {"chunks", r.source_chunk_ids},
                           {"degraded", r.degraded}});
    }
    for (const auto& c : elements.claims) {
        records.push_back({{"kind", "claim"},
                           {"subject", key_to_json(c.subject)},
                           {"object", c.object},
                           {"type", c.type},
                           {"desc", c.description},
                           {"tokens", c.token_count},
                           {"instances", c.instance_count},
                           {"chunks", c.source_chunk_ids},
                           {"degraded", c.degraded}});
    }
    ws.save_stage("element_summaries", records);
}

ElementSummaries load_element_summaries(const Workspace& ws) {
    ElementSummaries elements;
    for (const auto& r : ws.load_stage("element_summaries")) {
        const std::string kind = r.at("kind").get<std::string>();
        if (kind == "entity") {
            EntitySummary e;
            e.key = key_from_json(r.at("key"));
            e.display_name = r.at("display").get<std::string>();
            e.description = r.at("desc").get<std::string>();
            e.token_count = r.at("tokens").get<std::size_t>();
            e.instance_count = r.at("instances").get<std::size_t>();
            e.source_chunk_ids = r.at("chunks").get<std::vector<std::string>>();
            e.degraded = r.at("degraded").get<bool>();
            e.placeholder = r.at("placeholder").get<bool>();
            elements.entities.push_back(std::move(e));
        } else if (kind == "relationship") {
            RelationshipSummary rel;
            rel.source = key_from_json(r.at("source"));
            rel.target = key_from_json(r.at("target"));
            rel.description = r.at("desc").get<std::string>();
            rel.token_count = r.at("tokens").get<std::size_t>();
            rel.instance_count = r.at("instances").get<std::size_t>();
            rel.source_chunk_ids = r.at("chunks").get<std::vector<std::string>>();
            rel.degraded = r.at("degraded").get<bool>();
            elements.relationships.push_back(std::move(rel));
        } else {
            ClaimSummary c;
            c.subject = key_from_json(r.at("subject"));
            c.object = r.at("object").get<std::string>();
            c.type = r.at("type").get<std::string>();
            c.description = r.at("desc").get<std::string>();
            c.token_count = r.at("tokens").get<std::size_t>();
            c.instance_count = r.at("instances").get<std::size_t>();
            c.source_chunk_ids = r.at("chunks").get<std::vector<std::string>>();
            c.degraded = r.at("degraded").get<bool>();
            elements.claims.push_back(std::move(c));
        }
    }
    return elements;
}

void save_graph(Workspace& ws, const EntityGraph& graph) {
    std::vector<json> records;
    for (const auto& n : graph.nodes) {
        records.push_back({{"kind", "node"},
                           {"key", key_to_json(n.key)},
                           {"display", n.display_name},
                           {"desc", n.description},
                           {"placeholder", n.placeholder}});
    }
    for (const auto& e : graph.edges) {
        records.push_back({{"kind", "edge"},
                           {"source", e.source},
                           {"target", e.target},
                           {"desc", e.description},
                           {"weight", e.weight},
                           {"normalized_weight", e.normalized_weight},
                           {"instances", e.instance_count}});
    }
    ws.save_stage("graph", records);
}

EntityGraph load_graph(const Workspace& ws) {
    EntityGraph graph;
    for (const auto& r : ws.load_stage("graph")) {
        if (r.at("kind") == "node") {
            EntityNode n;
            n.key = key_from_json(r.at("key"));
            n.display_name = r.at("display").get<std::string>();
            n.description = r.at("desc").get<std::string>();
            n.placeholder = r.at("placeholder").get<bool>();
            graph.nodes.push_back(std::move(n));
        } else {
            RelationshipEdge e;
            e.source = r.at("source").get<std::uint32_t>();
            e.target = r.at("target").get<std::uint32_t>();
            e.description = r.at("desc").get<std::string>();
            e.weight = r.at("weight").get<double>();
            e.normalized_weight = r.at("normalized_weight").get<double>();
            e.instance_count = r.at("instances").get<std::size_t>();
            graph.edges.push_back(std::move(e));
        }
    }
    graph.incident.assign(graph.nodes.size(), {});
    for (std::uint32_t id = 0; id < graph.edges.size(); ++id) {
        graph.incident[graph.edges[id].source].push_back(id);
        graph.incident[graph.edges[id].target].push_back(id);
    }
    return graph;
}

void save_hierarchy(Workspace& ws, const CommunityHierarchy& hierarchy) {
    std::vector<json> records;
    for (const auto& level : hierarchy.levels) {
        for (const auto& c : level) {
            records.push_back({{"level", c.level},
                               {"id", c.id},
                               {"parent", c.parent_id},
                               {"nodes", c.nodes},
                               {"same_as_parent", c.same_as_parent}});
        }
    }
    ws.save_stage("hierarchy", records);
}

CommunityHierarchy load_hierarchy(const Workspace& ws, std::size_t node_count) {
    CommunityHierarchy hierarchy;
    for (const auto& r : ws.load_stage("hierarchy")) {
        Community c;
        c.level = r.at("level").get<int>();
        c.id = r.at("id").get<int>();
        c.parent_id = r.at("parent").get<int>();
        c.nodes = r.at("nodes").get<std::vector<std::uint32_t>>();
        c.same_as_parent = r.at("same_as_parent").get<bool>();
        if (c.level >= hierarchy.num_levels()) {
            hierarchy.levels.resize(static_cast<std::size_t>(c.level) + 1);
        }
        hierarchy.levels[static_cast<std::size_t>(c.level)].push_back(std::move(c));
    }
    hierarchy.assignments.assign(hierarchy.levels.size(), std::vector<int>(node_count, -1));
    for (std::size_t level = 0; level < hierarchy.levels.size(); ++level) {
        auto& communities = hierarchy.levels[level];
        std::sort(communities.begin(), communities.end(),
                  [](const Community& a, const Community& b) { return a.id < b.id; });
        for (const auto& c : communities) {
            for (std::uint32_t v : c.nodes) hierarchy.assignments[level][v] = c.id;
        }
    }
    return hierarchy;
}

void save_community_summaries(Workspace& ws,
                              const std::vector<std::vector<CommunitySummary>>& summaries) {
    std::vector<json> records;
    for (const auto& level : summaries) {
        for (const auto& s : level) {
            records.push_back({{"level", s.level},
                               {"id", s.community_id},
                               {"title", s.title},
                               {"body", s.body},
                               {"tokens", s.token_count},
                               {"context_tokens", s.context_token_count},
                               {"inputs", s.inputs_used},
                               {"truncated", s.truncated_context},
                               {"degraded", s.degraded},
                               {"reused", s.reused_from_child}});
        }
    }
    ws.save_stage("community_summaries", records);
}

std::vector<std::vector<CommunitySummary>> load_community_summaries(const Workspace& ws) {
    std::vector<std::vector<CommunitySummary>> summaries;
    for (const auto& r : ws.load_stage("community_summaries")) {
        CommunitySummary s;
        s.level = r.at("level").get<int>();
        s.community_id = r.at("id").get<int>();
        s.title = r.at("title").get<std::string>();
        s.body = r.at("body").get<std::string>();
        s.token_count = r.at("tokens").get<std::size_t>();
        s.context_token_count = r.at("context_tokens").get<std::size_t>();
        s.inputs_used = r.at("inputs").get<std::vector<std::string>>();
        s.truncated_context = r.at("truncated").get<bool>();
        s.degraded = r.at("degraded").get<bool>();
        s.reused_from_child = r.at("reused").get<bool>();
        if (s.level >= static_cast<int>(summaries.size())) {
            summaries.resize(static_cast<std::size_t>(s.level) + 1);
        }
        summaries[static_cast<std::size_t>(s.level)].push_back(std::move(s));
    }
    for (auto& level : summaries) {
        std::sort(level.begin(), level.end(), [](const CommunitySummary& a, const CommunitySummary& b) {
            return a.community_id < b.community_id;
        });
    }
    return summaries;
}

void save_embeddings(Workspace& ws, const ChunkEmbeddingStore& store) {
    std::vector<json> records;
    records.reserve(store.entries.size());
    for (const auto& e : store.entries) {
        records.push_back(
            {{"chunk_id", e.chunk_id}, {"vector", e.vector}, {"tokens", e.token_count}});
    }
    ws.save_stage("embeddings", records);
}

ChunkEmbeddingStore load_embeddings(const Workspace& ws) {
    ChunkEmbeddingStore store;
    for (const auto& r : ws.load_stage("embeddings")) {
        ChunkEmbedding e;
        e.chunk_id = r.at("chunk_id").get<std::string>();
        e.vector = r.at("vector").get<std::vector<double>>();
        e.token_count = r.at("tokens").get<std::size_t>();
        store.entries.push_back(std::move(e));
    }
    if (!store.entries.empty()) store.dimension = store.entries.front().vector.size();
    return store;
}

} // namespace graphsense

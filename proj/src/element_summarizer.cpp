#include "graphsense/element_summarizer.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "graphsense/util/parallel.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

namespace {

// Picks the entity identity a bare relationship endpoint name resolves to
// when several types share the name: most instances wins, then lexicographic
// type.
EntityKey resolve_name(const std::string& normalized_name,
                       const std::map<EntityKey, EntityGroup>& entities) {
    EntityKey best;
    std::size_t best_count = 0;
    bool found = false;
    for (auto it = entities.lower_bound(EntityKey{normalized_name, ""});
         it != entities.end() && it->first.normalized_name == normalized_name; ++it) {
        if (!found || it->second.instances.size() > best_count) {
            best = it->first;
            best_count = it->second.instances.size();
            found = true;
        }
    }
    if (found) return best;
    return EntityKey{normalized_name, ""};
}

std::vector<std::string> sorted_unique_chunks(const std::vector<InstanceNote>& notes) {
    std::set<std::string> ids;
    for (const auto& n : notes) ids.insert(n.chunk_id);
    return {ids.begin(), ids.end()};
}

std::string consolidate(const std::vector<std::string>& descriptions,
                        const std::string& element_kind,
                        const std::string& element_name,
                        const PromptLibrary& prompts,
                        LlmGateway& gateway,
                        std::size_t max_summary_tokens,
                        bool& degraded) {
    std::string notes;
    for (const auto& d : descriptions) notes += "- " + d + "\n";
    try {
        ChatRequest request = ChatRequest::single(
            prompts.render("element_summary",
                           {{"element_kind", element_kind},
                            {"element_name", element_name},
                            {"descriptions", notes},
                            {"max_tokens", std::to_string(max_summary_tokens)}}),
            max_summary_tokens);
        ChatResponse response = gateway.chat(request);
        return gateway.codec().take_prefix(trim(response.text), max_summary_tokens);
    } catch (const Error&) {
        degraded = true;
        std::string joined = join(descriptions, "; ");
        return gateway.codec().take_prefix(joined, max_summary_tokens);
    }
}

std::string describe_or_fallback(std::vector<std::string> descriptions,
                                 const std::string& kind,
                                 const std::string& name,
                                 const PromptLibrary& prompts,
                                 LlmGateway& gateway,
                                 std::size_t max_tokens,
                                 bool& degraded) {
    const bool singleton = descriptions.size() == 1;
    // Drop empty notes; deduplicate exact repeats but keep order.
    std::vector<std::string> kept;
    std::set<std::string> seen;
    for (auto& d : descriptions) {
        std::string t = trim(d);
        if (t.empty() || seen.count(t)) continue;
        seen.insert(t);
        kept.push_back(std::move(t));
    }
    if (kept.empty()) return kNoDescription;
    if (singleton) return gateway.codec().take_prefix(kept.front(), max_tokens);
    return consolidate(kept, kind, name, prompts, gateway, max_tokens, degraded);
}

} // namespace

ElementGroups group_instances(std::span<const ExtractionResult> results) {
    std::map<EntityKey, EntityGroup> entity_map;
    std::map<std::pair<std::string, std::string>, RelationshipGroup> rel_map;
    std::map<std::tuple<std::string, std::string, std::string>, ClaimGroup> claim_map;

    for (const auto& result : results) {
        for (const auto& inst : result.entities) {
            const std::string name = normalize_entity_name(inst.name);
            if (name.empty()) continue;
            EntityKey key{name, collapse_whitespace(to_lower_ascii(inst.type))};
            auto& group = entity_map[key];
            group.key = key;
            group.instances.push_back({inst.chunk_id, trim(inst.name), inst.description});
        }
        for (const auto& inst : result.relationships) {
            std::string a = normalize_entity_name(inst.source_name);
            std::string b = normalize_entity_name(inst.target_name);
            if (a.empty() || b.empty() || a == b) continue;
            if (b < a) std::swap(a, b);
            auto& group = rel_map[{a, b}];
            group.names = {a, b};
            group.instances.push_back({inst.chunk_id, "", inst.description});
        }
        for (const auto& inst : result.claims) {
            const std::string subject = normalize_entity_name(inst.subject);
            if (subject.empty()) continue;
            auto key = std::make_tuple(subject, collapse_whitespace(to_lower_ascii(inst.object)),
                                       collapse_whitespace(to_lower_ascii(inst.type)));
            auto& group = claim_map[key];
            group.object = std::get<1>(key);
            group.type = std::get<2>(key);
            group.instances.push_back(inst);
        }
    }

    // Placeholders for dangling relationship endpoints, then endpoint
    // resolution (placeholders participate so resolution is total).
    for (auto& [names, group] : rel_map) {
        for (const auto& name : {names.first, names.second}) {
            auto it = entity_map.lower_bound(EntityKey{name, ""});
            bool exists = it != entity_map.end() && it->first.normalized_name == name;
            if (!exists) {
                EntityKey key{name, ""};
                auto& placeholder = entity_map[key];
                placeholder.key = key;
                placeholder.placeholder = true;
                placeholder.instances.push_back({group.instances.front().chunk_id, name, ""});
            }
        }
        group.endpoints = {resolve_name(names.first, entity_map),
                           resolve_name(names.second, entity_map)};
    }

    ElementGroups out;
    for (auto& [key, group] : entity_map) out.entities.push_back(std::move(group));
    for (auto& [names, group] : rel_map) out.relationships.push_back(std::move(group));
    for (auto& [key, group] : claim_map) {
        group.subject = resolve_name(std::get<0>(key), entity_map);
        out.claims.push_back(std::move(group));
    }
    return out;
}

EntitySummary summarize_element(const EntityGroup& group,
                                const PromptLibrary& prompts,
                                LlmGateway& gateway,
                                std::size_t max_summary_tokens) {
    EntitySummary s;
    s.key = group.key;
    s.display_name = group.instances.front().original_name.empty()
                         ? group.key.normalized_name
                         : group.instances.front().original_name;
    s.instance_count = group.instances.size();
    s.source_chunk_ids = sorted_unique_chunks(group.instances);
    s.placeholder = group.placeholder;
    std::vector<std::string> descriptions;
    for (const auto& n : group.instances) descriptions.push_back(n.description);
    s.description = describe_or_fallback(std::move(descriptions), "entity", s.display_name,
                                         prompts, gateway, max_summary_tokens, s.degraded);
    s.token_count = gateway.codec().count(s.description);
    return s;
}

RelationshipSummary summarize_element(const RelationshipGroup& group,
                                      const PromptLibrary& prompts,
                                      LlmGateway& gateway,
                                      std::size_t max_summary_tokens) {
    RelationshipSummary s;
    s.source = group.endpoints.first;
    s.target = group.endpoints.second;
    s.instance_count = group.instances.size();
    s.source_chunk_ids = sorted_unique_chunks(group.instances);
    std::vector<std::string> descriptions;
    for (const auto& n : group.instances) descriptions.push_back(n.description);
    s.description = describe_or_fallback(std::move(descriptions), "relationship",
                                         group.names.first + " and " + group.names.second,
                                         prompts, gateway, max_summary_tokens, s.degraded);
    s.token_count = gateway.codec().count(s.description);
    return s;
}

ClaimSummary summarize_element(const ClaimGroup& group,
                               const PromptLibrary& prompts,
                               LlmGateway& gateway,
                               std::size_t max_summary_tokens) {
    ClaimSummary s;
    s.subject = group.subject;
    s.object = group.object;
    s.type = group.type;
    s.instance_count = group.instances.size();
    std::set<std::string> chunk_ids;
    std::vector<std::string> descriptions;
    for (const auto& c : group.instances) {
        chunk_ids.insert(c.chunk_id);
        descriptions.push_back(c.description);
    }
    s.source_chunk_ids.assign(chunk_ids.begin(), chunk_ids.end());
    s.description = describe_or_fallback(std::move(descriptions), "claim",
                                         group.subject.normalized_name, prompts, gateway,
                                         max_summary_tokens, s.degraded);
    s.token_count = gateway.codec().count(s.description);
    return s;
}

ElementSummaries summarize_elements(const ElementGroups& groups,
                                    const PromptLibrary& prompts,
                                    LlmGateway& gateway,
                                    std::size_t max_summary_tokens) {
    ElementSummaries out;
    out.entities.resize(groups.entities.size());
    out.relationships.resize(groups.relationships.size());
    out.claims.resize(groups.claims.size());

    const std::size_t concurrency = gateway.options().concurrency;
    parallel_for(groups.entities.size(), concurrency, [&](std::size_t i) {
        out.entities[i] = summarize_element(groups.entities[i], prompts, gateway,
                                            max_summary_tokens);
    });
    parallel_for(groups.relationships.size(), concurrency, [&](std::size_t i) {
        out.relationships[i] = summarize_element(groups.relationships[i], prompts, gateway,
                                                 max_summary_tokens);
    });
    parallel_for(groups.claims.size(), concurrency, [&](std::size_t i) {
        out.claims[i] = summarize_element(groups.claims[i], prompts, gateway,
                                          max_summary_tokens);
    });
    return out;
}

} // namespace graphsense

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "graphsense/errors.hpp"
#include "graphsense/util/strings.hpp"

namespace graphsense {

struct Document {
    std::string id;
    std::string title;
    std::string text;
};

// A contiguous token span of a source document. overlap_tokens is the number
// of leading tokens shared with the previous chunk (0 for the first chunk).
struct TextChunk {
    std::string id;
    std::string document_id;
    std::size_t index_in_document = 0;
    std::string text;
    std::size_t token_count = 0;
    std::size_t overlap_tokens = 0;
};

// One extracted mention of an entity in one chunk.
struct EntityInstance {
    std::string chunk_id;
    std::string name;
    std::string type;
    std::string description;
};

struct RelationshipInstance {
    std::string chunk_id;
    std::string source_name;
    std::string target_name;
    std::string description;
};

// ISO-8601 calendar date. Kept as a validated string plus comparable fields.
struct IsoDate {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const IsoDate&) const = default;

    std::string to_string() const;
    static std::optional<IsoDate> parse(std::string_view text);
};

struct ClaimInstance {
    std::string chunk_id;
    std::string subject;
    std::string object;
    std::string type;
    std::string description;
    std::string source_span;
    std::optional<IsoDate> start_date;
    std::optional<IsoDate> end_date;
};

// Canonical entity identity: (case-folded, whitespace-collapsed name, type).
// Fuzzy alias merging is deliberately not part of the identity rule; residual
// name variants are absorbed downstream by community connectivity.
struct EntityKey {
    std::string normalized_name;
    std::string type;

    auto operator<=>(const EntityKey&) const = default;

    std::string to_string() const { return normalized_name + "|" + type; }
};

inline EntityKey normalize_entity_key(std::string_view name, std::string_view type) {
    std::string normalized = collapse_whitespace(to_lower_ascii(name));
    if (normalized.empty()) {
        throw EmptyName("entity name is empty after normalization");
    }
    return EntityKey{std::move(normalized), collapse_whitespace(to_lower_ascii(type))};
}

inline std::string normalize_entity_name(std::string_view name) {
    return collapse_whitespace(to_lower_ascii(name));
}

} // namespace graphsense

#pragma once

#include <span>
#include <string>
#include <vector>

#include "graphsense/core/model.hpp"
#include "graphsense/llm/gateway.hpp"
#include "graphsense/prompts.hpp"

namespace graphsense {

struct ExtractionPromptConfig {
    std::vector<std::string> entity_types = {"person", "organization", "location",
                                             "event", "concept"};
    // (input excerpt, expected tuple records) pairs rendered into the prompt.
    std::vector<std::pair<std::string, std::string>> few_shot_examples;
    bool claims_enabled = false;
    int max_gleanings = 1;
    std::string delimiter = "<|>";
    std::string yes_token = "YES";
    std::string no_token = "NO";
    std::size_t max_output_tokens = 1500;
};

struct ParsedTuples {
    std::vector<EntityInstance> entities;
    std::vector<RelationshipInstance> relationships;
    std::vector<ClaimInstance> claims;
    int malformed_count = 0;
};

// Total parser for the delimited-tuple output format. Records are
// parenthesized groups whose first field names the record kind; groups that
// fail the shape (wrong field count, empty name, self-relationship, bad
// dates) are counted and skipped. Never throws, for any byte input.
ParsedTuples parse_tuples(std::string_view raw,
                          std::string_view delimiter = "<|>",
                          std::string_view chunk_id = "");

enum class ExtractionStatus { Ok, Degraded, Failed };

struct ExtractionResult {
    std::string chunk_id;
    std::size_t chunk_index = 0;
    std::vector<EntityInstance> entities;
    std::vector<RelationshipInstance> relationships;
    std::vector<ClaimInstance> claims;
    int gleaning_rounds_used = 0;
    int malformed_records_skipped = 0;
    ExtractionStatus status = ExtractionStatus::Ok;
    std::string note; // failure/degradation detail
};

// Base extraction plus up to max_gleanings rounds of (assess, glean).
// The assessment forces a yes/no decision via logit bias 100 on the
// configured tokens; a "no" triggers the continuation prompt and another
// parse. A gateway error during gleaning degrades the result but keeps
// everything accumulated so far; an error on the base call propagates.
ExtractionResult extract_from_chunk(const TextChunk& chunk,
                                    const ExtractionPromptConfig& cfg,
                                    const PromptLibrary& prompts,
                                    LlmGateway& gateway);

// Concurrent batch extraction. Results are ordered by chunk index regardless
// of completion order; per-chunk failures are recorded in the result rather
// than aborting the batch. Throws BatchAborted only when every chunk fails.
std::vector<ExtractionResult> run_extraction(std::span<const TextChunk> chunks,
                                             const ExtractionPromptConfig& cfg,
                                             const PromptLibrary& prompts,
                                             LlmGateway& gateway);

} // namespace graphsense

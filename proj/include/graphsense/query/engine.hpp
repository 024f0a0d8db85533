#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphsense/community/summarizer.hpp"
#include "graphsense/llm/gateway.hpp"
#include "graphsense/token_codec.hpp"

namespace graphsense {

struct QueryConfig {
    int level = 0;
    std::size_t batch_token_size = 8000;
    std::size_t final_context_tokens = 8000;
    std::size_t map_max_answer_tokens = 1000;
    std::uint64_t seed = 0;
};

// One unit of map-phase context: a community summary for the graph
// conditions, a source chunk for TS. The same machinery serves both.
struct SourceRecord {
    std::string id;
    std::string text;
    std::size_t tokens = 0;
};

struct Batch {
    int index = 0;
    std::vector<std::string> record_ids;
    std::string text;
    std::size_t token_count = 0;
    bool truncated = false; // single record larger than the batch size
};

// Fisher-Yates shuffle seeded from `seed`, then greedy packing in shuffled
// order: a record that no longer fits closes the batch and starts the next.
// A record larger than the batch size occupies its own batch, truncated and
// flagged. Every record lands in exactly one batch.
std::vector<Batch> prepare_batches(const std::vector<SourceRecord>& records,
                                   std::size_t batch_token_size,
                                   std::uint64_t seed,
                                   const TokenCodec& codec);

struct RatedAnswer {
    int batch_index = 0;
    std::string text;
    int score = 0;
    bool flagged = false; // parse failure or clamped score
    bool failed = false;  // gateway error; score forced to 0
};

// One map call: answer + self-rated helpfulness in a JSON payload. Parse
// failures preserve the raw text with score 0; gateway errors yield a failed
// zero-score answer (the map phase is loss-tolerant).
RatedAnswer map_answer(const std::string& query,
                       const Batch& batch,
                       const PromptLibrary& prompts,
                       LlmGateway& gateway,
                       std::size_t max_answer_tokens);

struct LedgerEntry {
    int batch_index = 0;
    int score = 0;
    std::size_t tokens = 0;
};

struct GlobalAnswer {
    std::string condition;
    std::string text;
    std::vector<LedgerEntry> used_answers; // packing order; scores non-increasing
    int filtered_zero_count = 0;
    int total_map_calls = 0;
    std::size_t context_tokens_consumed = 0; // packed batch tokens + final context tokens
};

inline constexpr const char* kNoAnswerText =
    "No relevant information was found in the indexed dataset.";

// Zero scores filtered; survivors stable-sorted by (score desc, batch asc);
// greedy prefix packed into the final window; one LLM call produces the
// global answer. With no survivors the canonical no-answer text is returned
// without an LLM call. A failing final call is QueryFailed.
GlobalAnswer reduce_answers(const std::string& query,
                            const std::vector<RatedAnswer>& rated,
                            std::size_t final_context_tokens,
                            const PromptLibrary& prompts,
                            LlmGateway& gateway,
                            const std::string& context_label = "rated intermediate answers");

// prepare_batches -> parallel map_answer -> reduce_answers. Results are
// assembled by batch index, so completion order never affects the output.
GlobalAnswer map_reduce_answer(const std::string& query,
                               const std::vector<SourceRecord>& records,
                               const QueryConfig& cfg,
                               const PromptLibrary& prompts,
                               LlmGateway& gateway);

// Community summaries of the projected level, rendered as map-phase records.
std::vector<SourceRecord> summary_records(
    const std::vector<std::vector<CommunitySummary>>& summaries_by_level,
    const ProjectedLevel& level,
    const TokenCodec& codec);

// Full graph condition: project the hierarchy level, batch its summaries,
// map, reduce.
GlobalAnswer answer_with_summaries(const std::string& query,
                                   const CommunityHierarchy& hierarchy,
                                   const std::vector<std::vector<CommunitySummary>>& summaries,
                                   const QueryConfig& cfg,
                                   const PromptLibrary& prompts,
                                   LlmGateway& gateway);

} // namespace graphsense

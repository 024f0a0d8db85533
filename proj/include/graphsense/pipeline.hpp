#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "graphsense/config.hpp"
#include "graphsense/llm/gateway.hpp"
#include "graphsense/llm/mock_provider.hpp"
#include "graphsense/prompts.hpp"
#include "graphsense/query/engine.hpp"
#include "graphsense/workspace/workspace.hpp"

namespace graphsense {

// Configured collaborators shared by every pipeline command.
struct PipelineContext {
    Config config;
    PromptLibrary prompts;
    std::shared_ptr<TokenCodec> codec;
    GatewayPtr gateway;
    // Set when llm.provider = mock; used by tests to inspect call logs.
    std::shared_ptr<MockChatProvider> mock_chat;
};

// Builds providers, codec and prompt overrides for a workspace.
PipelineContext make_context(const Config& config, const std::filesystem::path& workspace_root);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
    std::size_t records = 0;
    bool skipped = false; // already complete (resume)
};

struct LevelStat {
    int level = 0;
    std::size_t communities = 0;
    std::size_t summaries = 0;
    std::size_t summary_tokens = 0;
};

struct IndexReport {
    std::vector<StageTiming> stages;
    std::size_t documents = 0;
    std::size_t chunks = 0;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::vector<LevelStat> levels;

    std::string summary_table() const; // the per-level community summary table
};

// Reads *.txt files (sorted by filename; the stem becomes the document id).
std::vector<Document> load_corpus(const std::filesystem::path& corpus_dir);

// Runs every index stage that is not already complete, in DAG order:
// chunks, extraction, element_summaries, graph, hierarchy,
// community_summaries, embeddings.
IndexReport run_index(Workspace& ws, PipelineContext& ctx, const std::vector<Document>& corpus);

inline const std::vector<std::string>& condition_names() {
    static const std::vector<std::string> kNames = {"c0", "c1", "c2", "c3", "ts", "ss"};
    return kNames;
}

// Answers one query under a condition (c0..c3, ts, ss) against a completed
// workspace.
GlobalAnswer answer_condition(Workspace& ws,
                              PipelineContext& ctx,
                              const std::string& condition,
                              const std::string& question,
                              std::uint64_t seed);

} // namespace graphsense

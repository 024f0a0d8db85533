#include "graphsense/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "graphsense/chunker.hpp"
#include "graphsense/element_summarizer.hpp"
#include "graphsense/extractor.hpp"
#include "graphsense/graph/leiden.hpp"
#include "graphsense/llm/http_provider.hpp"
#include "graphsense/query/baselines.hpp"
#include "graphsense/util/hash.hpp"
#include "graphsense/workspace/stage_io.hpp"

namespace graphsense {

namespace fs = std::filesystem;

namespace {

std::shared_ptr<MockChatProvider> make_mock_chat(const Config& config,
                                                 std::shared_ptr<TokenCodec> codec) {
    const std::string mode = config.get_string("llm.mock_mode");
    const auto seed = static_cast<std::uint64_t>(config.get_int("seed"));
    if (mode == "hash") {
        return std::make_shared<MockChatProvider>(MockChatProvider::Mode::Hash,
                                                  derive_seed(seed, "llm"), codec);
    }
    if (mode != "scripted") {
        throw InvalidConfig("llm.mock_mode must be hash or scripted, got " + mode);
    }
    auto mock = std::make_shared<MockChatProvider>(MockChatProvider::Mode::Scripted,
                                                   derive_seed(seed, "llm"), codec);
    const std::string script_path = config.get_string("llm.mock_script");
    if (!script_path.empty()) {
        std::ifstream in(script_path);
        if (!in) throw InvalidConfig("cannot read llm.mock_script: " + script_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        auto script = nlohmann::json::parse(buf.str(), nullptr, false);
        if (script.is_discarded() || !script.is_array()) {
            throw InvalidConfig("llm.mock_script must be a JSON array of {match, reply}");
        }
        for (const auto& entry : script) {
            mock->add_script(entry.at("match").get<std::string>(),
                             entry.at("reply").get<std::string>(), entry.value("max_uses", 0));
        }
    }
    return mock;
}

std::string api_key_from_env(const Config& config) {
    const std::string var = config.get_string("llm.api_key_env");
    const char* value = var.empty() ? nullptr : std::getenv(var.c_str());
    return value ? value : "";
}

ExtractionPromptConfig extraction_config(const Config& config) {
    ExtractionPromptConfig cfg;
    cfg.entity_types = config.get_list("extraction.entity_types");
    cfg.max_gleanings = static_cast<int>(config.get_int("extraction.max_gleanings"));
    cfg.claims_enabled = config.get_bool("extraction.claims_enabled");
    cfg.delimiter = config.get_string("extraction.delimiter");
    cfg.yes_token = config.get_string("extraction.yes_token");
    cfg.no_token = config.get_string("extraction.no_token");
    return cfg;
}

LeidenConfig leiden_config(const Config& config) {
    LeidenConfig cfg;
    cfg.resolution = config.get_real("leiden.resolution");
    cfg.randomness = config.get_real("leiden.randomness");
    cfg.max_levels = static_cast<std::size_t>(config.get_int("leiden.max_levels"));
    cfg.min_improvement = config.get_real("leiden.min_improvement");
    cfg.seed = derive_seed(static_cast<std::uint64_t>(config.get_int("seed")), "leiden");
    return cfg;
}

PackingBudget packing_budget(const Config& config) {
    PackingBudget budget;
    budget.context_limit_tokens =
        static_cast<std::size_t>(config.get_int("summarize.context_limit_tokens"));
    budget.summary_limit_tokens =
        static_cast<std::size_t>(config.get_int("summarize.summary_limit_tokens"));
    return budget;
}

QueryConfig query_config(const Config& config, int level, std::uint64_t seed) {
    QueryConfig cfg;
    cfg.level = level;
    cfg.batch_token_size = static_cast<std::size_t>(config.get_int("query.batch_token_size"));
    cfg.final_context_tokens =
        static_cast<std::size_t>(config.get_int("query.final_context_tokens"));
    cfg.map_max_answer_tokens =
        static_cast<std::size_t>(config.get_int("query.map_max_answer_tokens"));
    cfg.seed = derive_seed(seed, "query");
    return cfg;
}

} // namespace

PipelineContext make_context(const Config& config, const fs::path& workspace_root) {
    PipelineContext ctx;
    ctx.config = config;
    ctx.codec = make_codec(config.get_string("codec.name"));
    ctx.prompts.load_overrides(workspace_root / "prompts");

    ChatProviderPtr chat;
    const std::string provider = config.get_string("llm.provider");
    if (provider == "mock") {
        ctx.mock_chat = make_mock_chat(config, ctx.codec);
        chat = ctx.mock_chat;
    } else if (provider == "http") {
        HttpProviderConfig http;
        http.endpoint = config.get_string("llm.endpoint");
        http.model = config.get_string("llm.model");
        http.api_key = api_key_from_env(config);
        chat = std::make_shared<HttpChatProvider>(http);
    } else {
        throw InvalidConfig("llm.provider must be mock or http, got " + provider);
    }

    EmbeddingProviderPtr embedding;
    const std::string embed_provider = config.get_string("embedding.provider");
    if (embed_provider == "mock") {
        embedding = std::make_shared<MockEmbeddingProvider>(
            static_cast<std::size_t>(config.get_int("embedding.dimension")));
    } else if (embed_provider == "http") {
        HttpProviderConfig http;
        http.endpoint = config.get_string("embedding.endpoint");
        http.model = config.get_string("embedding.model");
        http.api_key = api_key_from_env(config);
        embedding = std::make_shared<HttpEmbeddingProvider>(http);
    } else {
        throw InvalidConfig("embedding.provider must be mock or http, got " + embed_provider);
    }

    GatewayOptions options;
    options.concurrency = static_cast<std::size_t>(config.get_int("llm.concurrency"));
    options.max_retries = static_cast<std::size_t>(config.get_int("llm.max_retries"));
    options.retry_base = std::chrono::milliseconds(config.get_int("llm.retry_base_ms"));
    options.context_limit_tokens =
        static_cast<std::size_t>(config.get_int("llm.context_limit_tokens"));
    ctx.gateway = std::make_shared<LlmGateway>(chat, embedding, options, ctx.codec);
    return ctx;
}

std::vector<Document> load_corpus(const fs::path& corpus_dir) {
    if (!fs::exists(corpus_dir) || !fs::is_directory(corpus_dir)) {
        throw InvalidConfig("corpus directory does not exist: " + corpus_dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<Document> docs;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        Document doc;
        doc.id = file.stem().string();
        doc.title = doc.id;
        doc.text = buf.str();
        if (!doc.text.empty()) docs.push_back(std::move(doc));
    }
    return docs;
}

std::string IndexReport::summary_table() const {
    std::ostringstream out;
    out << "level  communities  summaries  summary_tokens\n";
    for (const auto& row : levels) {
        out << "C" << row.level << "     " << row.communities << "            " << row.summaries
            << "          " << row.summary_tokens << "\n";
    }
    return out.str();
}

IndexReport run_index(Workspace& ws, PipelineContext& ctx, const std::vector<Document>& corpus) {
    IndexReport report;
    report.documents = corpus.size();

    auto timed = [&](const std::string& stage, auto&& fn) {
        StageTiming timing;
        timing.stage = stage;
        if (ws.stage_complete(stage)) {
            timing.skipped = true;
            timing.records = ws.stage_record_count(stage);
            report.stages.push_back(timing);
            return;
        }
        const auto start = std::chrono::steady_clock::now();
        fn();
        timing.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        timing.records = ws.stage_record_count(stage);
        report.stages.push_back(timing);
    };

    timed("chunks", [&] {
        ChunkingConfig cfg;
        cfg.chunk_size_tokens = static_cast<std::size_t>(ctx.config.get_int("chunking.size"));
        cfg.overlap_tokens = static_cast<std::size_t>(ctx.config.get_int("chunking.overlap"));
        std::vector<TextChunk> chunks;
        for (const auto& doc : corpus) {
            auto piece = chunk_document(doc, cfg, *ctx.codec);
            chunks.insert(chunks.end(), piece.begin(), piece.end());
        }
        if (chunks.empty()) {
            throw InvalidConfig("chunks stage produced no chunks: corpus is empty");
        }
        save_chunks(ws, chunks);
    });

    timed("extraction", [&] {
        auto chunks = load_chunks(ws);
        auto results = run_extraction(chunks, extraction_config(ctx.config), ctx.prompts,
                                      *ctx.gateway);
        save_extraction(ws, results);
    });

    timed("element_summaries", [&] {
        auto results = load_extraction(ws);
        auto groups = group_instances(results);
        auto elements = summarize_elements(
            groups, ctx.prompts, *ctx.gateway,
            static_cast<std::size_t>(ctx.config.get_int("summarize.element_max_tokens")));
        save_element_summaries(ws, elements);
    });

    timed("graph", [&] {
        auto elements = load_element_summaries(ws);
        auto graph = build_graph(elements.entities, elements.relationships);
        save_graph(ws, graph);
        std::ostringstream edges;
        export_edge_list(graph, edges);
        ws.write_report("graph_edges.tsv", edges.str());
    });

    timed("hierarchy", [&] {
        auto graph = load_graph(ws);
        auto hierarchy = detect_communities(graph, leiden_config(ctx.config));
        save_hierarchy(ws, hierarchy);
    });

    timed("community_summaries", [&] {
        auto graph = load_graph(ws);
        auto elements = load_element_summaries(ws);
        auto hierarchy = load_hierarchy(ws, graph.node_count());
        auto summaries = summarize_all_communities(hierarchy, graph, elements,
                                                   packing_budget(ctx.config), ctx.prompts,
                                                   *ctx.gateway);
        save_community_summaries(ws, summaries);
    });

    if (ctx.config.get_bool("embedding.enabled")) {
        timed("embeddings", [&] {
            auto chunks = load_chunks(ws);
            save_embeddings(ws, build_embedding_store(chunks, *ctx.gateway));
        });
    }

    ws.store_config_snapshot(ctx.config.values());

    // Report numbers.
    report.chunks = ws.stage_record_count("chunks");
    {
        auto graph = load_graph(ws);
        report.nodes = graph.node_count();
        report.edges = graph.edge_count();
        auto hierarchy = load_hierarchy(ws, graph.node_count());
        auto summaries = load_community_summaries(ws);
        for (int level = 0; level < hierarchy.num_levels(); ++level) {
            LevelStat stat;
            stat.level = level;
            stat.communities = hierarchy.levels[static_cast<std::size_t>(level)].size();
            if (level < static_cast<int>(summaries.size())) {
                stat.summaries = summaries[static_cast<std::size_t>(level)].size();
                for (const auto& s : summaries[static_cast<std::size_t>(level)]) {
                    stat.summary_tokens += s.token_count;
                }
            }
            report.levels.push_back(stat);
        }
    }
    ws.write_report("index_summary.txt", report.summary_table());
    return report;
}

GlobalAnswer answer_condition(Workspace& ws,
                              PipelineContext& ctx,
                              const std::string& condition,
                              const std::string& question,
                              std::uint64_t seed) {
    const auto& names = condition_names();
    if (std::find(names.begin(), names.end(), condition) == names.end()) {
        throw InvalidConfig("unknown condition: " + condition +
                            " (expected c0, c1, c2, c3, ts or ss)");
    }

    if (condition == "ts") {
        if (!ws.stage_complete("chunks")) throw NoIndex("workspace has no chunks stage");
        QueryConfig cfg = query_config(ctx.config, 0, seed);
        return ts_answer(question, load_chunks(ws), cfg, ctx.prompts, *ctx.gateway);
    }
    if (condition == "ss") {
        if (!ws.stage_complete("embeddings")) {
            throw NoIndex("workspace has no embeddings stage (embedding.enabled = false?)");
        }
        auto store = load_embeddings(ws);
        auto chunks = load_chunks(ws);
        return ss_answer(question, store, chunks,
                         static_cast<std::size_t>(
                             ctx.config.get_int("query.final_context_tokens")),
                         ctx.prompts, *ctx.gateway);
    }

    if (!ws.stage_complete("community_summaries") || !ws.stage_complete("hierarchy")) {
        throw NoIndex("workspace index is incomplete; run the index command first");
    }
    const int level = condition[1] - '0';
    auto graph = load_graph(ws);
    auto hierarchy = load_hierarchy(ws, graph.node_count());
    auto summaries = load_community_summaries(ws);
    QueryConfig cfg = query_config(ctx.config, level, seed);
    return answer_with_summaries(question, hierarchy, summaries, cfg, ctx.prompts, *ctx.gateway);
}

} // namespace graphsense

// graphsense: build a graph-based text index and answer global questions
// over it. See README.md for the pipeline description.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "graphsense/errors.hpp"
#include "graphsense/eval/harness.hpp"
#include "graphsense/pipeline.hpp"
#include "graphsense/util/hash.hpp"
#include "graphsense/workspace/stage_io.hpp"

namespace gs = graphsense;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string workspace = "workspace";
    std::string config_file;
    std::vector<std::string> overrides; // key=value
    std::int64_t seed = -1;             // -1: keep config value
    bool json_output = false;
};

gs::Config load_config(const CommonArgs& args) {
    gs::Config config;
    const auto workspace_config =
        std::filesystem::path(args.workspace) / "graphsense.toml";
    if (!args.config_file.empty()) {
        config.apply_file(args.config_file);
    } else if (std::filesystem::exists(workspace_config)) {
        config.apply_file(workspace_config);
    }
    for (const auto& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw gs::InvalidConfig("--set expects key=value, got: " + kv);
        }
        config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed >= 0) config.set("seed", std::to_string(args.seed));
    return config;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--workspace,-w", args.workspace, "workspace directory")
        ->capture_default_str();
    cmd->add_option("--config", args.config_file,
                    "config file (default: <workspace>/graphsense.toml when present)");
    cmd->add_option("--set", args.overrides, "override a config key (key=value, repeatable)");
    cmd->add_option("--seed", args.seed, "root seed (overrides config key 'seed')");
    cmd->add_flag("--json", args.json_output, "machine-readable output");
}

std::string config_reference() {
    std::string out = "Config keys (config file or --set):\n";
    for (const auto& e : gs::Config::schema()) {
        out += "  " + e.key + " (default: " + (e.default_value.empty() ? "\"\"" : e.default_value) +
               ") - " + e.description + "\n";
    }
    return out;
}

json ledger_json(const gs::GlobalAnswer& answer) {
    json ledger = json::array();
    for (const auto& entry : answer.used_answers) {
        ledger.push_back({{"batch", entry.batch_index},
                          {"score", entry.score},
                          {"tokens", entry.tokens}});
    }
    return json{{"condition", answer.condition},
                {"answer", answer.text},
                {"ledger", ledger},
                {"filtered_zero_count", answer.filtered_zero_count},
                {"total_map_calls", answer.total_map_calls},
                {"context_tokens_consumed", answer.context_tokens_consumed}};
}

int cmd_index(const CommonArgs& args, const std::string& corpus_dir) {
    gs::Config config = load_config(args);
    gs::Workspace ws(args.workspace);
    auto ctx = gs::make_context(config, args.workspace);
    ctx.prompts.export_defaults(ws.prompts_dir());

    auto corpus = gs::load_corpus(corpus_dir);
    auto report = gs::run_index(ws, ctx, corpus);

    if (args.json_output) {
        json stages = json::array();
        for (const auto& s : report.stages) {
            stages.push_back({{"stage", s.stage},
                              {"seconds", s.seconds},
                              {"records", s.records},
                              {"skipped", s.skipped}});
        }
        json levels = json::array();
        for (const auto& l : report.levels) {
            levels.push_back({{"level", l.level},
                              {"communities", l.communities},
                              {"summaries", l.summaries},
                              {"summary_tokens", l.summary_tokens}});
        }
        std::cout << json{{"documents", report.documents},
                          {"chunks", report.chunks},
                          {"nodes", report.nodes},
                          {"edges", report.edges},
                          {"stages", stages},
                          {"levels", levels}}
                         .dump(2)
                  << "\n";
        return 0;
    }

    for (const auto& s : report.stages) {
        if (s.skipped) {
            std::cout << "stage " << s.stage << ": complete (resume), " << s.records
                      << " records\n";
        } else {
            std::cout << "stage " << s.stage << ": " << s.records << " records in " << s.seconds
                      << "s\n";
        }
    }
    std::cout << "documents: " << report.documents << ", chunks: " << report.chunks
              << ", graph: " << report.nodes << " nodes / " << report.edges << " edges\n";
    std::cout << "community summaries per level:\n" << report.summary_table();
    return 0;
}

int cmd_query(const CommonArgs& args, const std::string& condition, const std::string& question,
              bool show_ledger) {
    gs::Config config = load_config(args);
    gs::Workspace ws(args.workspace);
    auto ctx = gs::make_context(config, args.workspace);

    const auto seed = static_cast<std::uint64_t>(config.get_int("seed"));
    auto answer = gs::answer_condition(ws, ctx, condition, question, seed);

    if (args.json_output) {
        std::cout << ledger_json(answer).dump(2) << "\n";
        return 0;
    }
    std::cout << answer.text << "\n";
    if (show_ledger) {
        std::cout << "\n-- ledger (" << answer.condition << ") --\n";
        for (const auto& entry : answer.used_answers) {
            std::cout << "batch " << entry.batch_index << "  score " << entry.score << "  tokens "
                      << entry.tokens << "\n";
        }
        std::cout << "filtered zero-score answers: " << answer.filtered_zero_count << "\n";
        std::cout << "map calls: " << answer.total_map_calls << "\n";
        std::cout << "context tokens consumed: " << answer.context_tokens_consumed << "\n";
        ws.write_report("last_query.json", ledger_json(answer).dump(2) + "\n");
    }
    return 0;
}

int cmd_inspect(const CommonArgs& args, int level) {
    gs::Config config = load_config(args);
    gs::Workspace ws(args.workspace);

    auto summaries = gs::load_community_summaries(ws);
    if (summaries.empty()) throw gs::NoIndex("workspace has no community summaries");
    const int effective = std::min<int>(level, static_cast<int>(summaries.size()) - 1);

    if (args.json_output) {
        json rows = json::array();
        for (const auto& s : summaries[static_cast<std::size_t>(effective)]) {
            rows.push_back({{"id", s.community_id},
                            {"title", s.title},
                            {"tokens", s.token_count},
                            {"context_tokens", s.context_token_count}});
        }
        std::cout << json{{"level", effective}, {"communities", rows}}.dump(2) << "\n";
        return 0;
    }
    std::cout << "level " << effective << " (" << summaries[static_cast<std::size_t>(effective)].size()
              << " communities)\n";
    for (const auto& s : summaries[static_cast<std::size_t>(effective)]) {
        std::cout << "C" << s.community_id << "  " << s.title << "  [summary " << s.token_count
                  << " tok, context " << s.context_token_count << " tok]\n";
    }
    return 0;
}

int cmd_questions(const CommonArgs& args, const std::string& description, int n,
                  const std::string& out_path) {
    gs::Config config = load_config(args);
    auto ctx = gs::make_context(config, args.workspace);

    auto set = gs::generate_questions(description, n, ctx.prompts, *ctx.gateway);

    std::string payload;
    for (const auto& q : set.questions) {
        payload += json{{"id", q.id}, {"persona", q.persona}, {"task", q.task}, {"question", q.text}}
                       .dump() +
                   "\n";
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        out << payload;
    }
    if (args.json_output) {
        std::cout << json{{"n", set.n},
                          {"questions", set.questions.size()},
                          {"complete", set.complete},
                          {"file", out_path}}
                         .dump(2)
                  << "\n";
    } else {
        std::cout << "generated " << set.questions.size() << " questions (n=" << set.n
                  << (set.complete ? "" : ", incomplete") << ")\n";
        if (out_path.empty()) std::cout << payload;
    }
    return 0;
}

std::vector<gs::Question> load_questions_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gs::InvalidConfig("cannot read questions file: " + path);
    std::vector<gs::Question> questions;
    std::string line;
    while (std::getline(in, line)) {
        if (gs::trim_view(line).empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            throw gs::InvalidConfig("questions file has an unparsable line: " + path);
        }
        gs::Question q;
        q.id = record.value("id", "q" + std::to_string(questions.size()));
        q.persona = record.value("persona", "");
        q.task = record.value("task", "");
        q.text = record.value("question", record.value("text", ""));
        if (q.text.empty()) throw gs::InvalidConfig("question record without text in " + path);
        questions.push_back(std::move(q));
    }
    if (questions.empty()) throw gs::InvalidConfig("questions file is empty: " + path);
    return questions;
}

int cmd_eval(const CommonArgs& args, const std::string& conditions_csv,
             const std::string& metrics_csv, const std::string& questions_path, int trials,
             const std::string& out_path) {
    gs::Config config = load_config(args);
    gs::Workspace ws(args.workspace);
    auto ctx = gs::make_context(config, args.workspace);

    std::vector<std::string> conditions;
    for (auto& c : gs::split(conditions_csv, ",")) {
        std::string t = gs::trim(c);
        if (!t.empty()) conditions.push_back(t);
    }
    std::vector<gs::Metric> metrics;
    if (metrics_csv == "all" || metrics_csv.empty()) {
        metrics = gs::builtin_metrics();
    } else {
        for (auto& m : gs::split(metrics_csv, ",")) {
            metrics.push_back(gs::metric_by_name(gs::trim(m)));
        }
    }
    auto questions = load_questions_file(questions_path);

    gs::JudgeOptions options;
    options.trials = trials > 0 ? trials : static_cast<int>(config.get_int("eval.trials"));
    options.seed = gs::derive_seed(static_cast<std::uint64_t>(config.get_int("seed")), "eval");
    options.alternate_order = config.get_bool("eval.alternate_order");

    const auto seed = static_cast<std::uint64_t>(config.get_int("seed"));
    gs::AnswerFn answers = [&](const std::string& condition, const gs::Question& q) {
        return gs::answer_condition(ws, ctx, condition, q.text, seed).text;
    };

    auto matrix = gs::run_tournament(questions, conditions, metrics, answers, options,
                                     ctx.prompts, *ctx.gateway);

    json out;
    out["conditions"] = matrix.conditions;
    out["questions"] = matrix.question_count;
    out["trials"] = options.trials;
    out["failed_pairs"] = matrix.failed_pairs;
    out["metrics"] = json::object();
    for (std::size_t m = 0; m < matrix.metrics.size(); ++m) {
        out["metrics"][matrix.metrics[m]] = matrix.cells[m];
    }
    const std::string rendered = out.dump(2) + "\n";
    if (!out_path.empty()) {
        std::ofstream file(out_path, std::ios::binary);
        file << rendered;
    } else {
        ws.write_report("winrates.json", rendered);
    }

    if (args.json_output) {
        std::cout << rendered;
        return 0;
    }
    for (std::size_t m = 0; m < matrix.metrics.size(); ++m) {
        std::cout << "metric: " << matrix.metrics[m] << "\n";
        std::cout << "          ";
        for (const auto& c : matrix.conditions) std::cout << c << "      ";
        std::cout << "\n";
        for (std::size_t i = 0; i < matrix.conditions.size(); ++i) {
            std::cout << matrix.conditions[i] << "  ";
            for (std::size_t j = 0; j < matrix.conditions.size(); ++j) {
                std::printf("%8.3f", matrix.cells[m][i][j]);
            }
            std::cout << "\n";
        }
    }
    std::cout << "(row beats column at the printed rate; ties count 0.5)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"graphsense: graph-index a text corpus and answer global questions over it"};
    app.require_subcommand(1);
    app.footer(config_reference());

    CommonArgs index_args, query_args, inspect_args, questions_args, eval_args;

    auto* index = app.add_subcommand("index", "build all index stages from a corpus directory");
    std::string corpus_dir;
    index->add_option("--corpus,-c", corpus_dir, "directory of .txt files")->required();
    add_common(index, index_args);

    auto* query = app.add_subcommand("query", "answer a question under one condition");
    std::string condition = "c0";
    std::string question;
    int query_level = -1;
    bool show_ledger = false;
    auto* condition_opt = query->add_option("--condition", condition, "c0|c1|c2|c3|ts|ss")
                              ->check(CLI::IsMember(gs::condition_names()))
                              ->capture_default_str();
    query->add_option("--level", query_level, "community level; shorthand for --condition c<N>")
        ->check(CLI::Range(0, 3))
        ->excludes(condition_opt);
    query->add_option("--question,-q", question, "the question to answer")->required();
    query->add_flag("--show-ledger", show_ledger, "print the answer ledger and token accounting");
    add_common(query, query_args);

    auto* inspect = app.add_subcommand("inspect", "list community summaries at a level");
    int level = 0;
    inspect->add_option("--level,-l", level, "hierarchy level")->capture_default_str();
    add_common(inspect, inspect_args);

    auto* questions = app.add_subcommand("questions", "generate activity-centered questions");
    std::string description;
    std::string questions_out;
    int n = 5;
    questions->add_option("--description,-d", description, "short dataset description")
        ->required();
    questions->add_option("--n", n, "users, tasks per user and questions per task")
        ->capture_default_str();
    questions->add_option("--out,-o", questions_out, "output questions JSONL path");
    add_common(questions, questions_args);

    auto* eval = app.add_subcommand("eval", "head-to-head judge comparison of conditions");
    std::string conditions_csv = "c0,c2,ts,ss";
    std::string metrics_csv = "all";
    std::string questions_path;
    std::string eval_out;
    int trials = 0;
    eval->add_option("--conditions", conditions_csv, "comma-separated condition list")
        ->capture_default_str();
    eval->add_option("--metrics", metrics_csv, "all or comma-separated metric names")
        ->capture_default_str();
    eval->add_option("--questions", questions_path, "questions JSONL file")->required();
    eval->add_option("--trials", trials, "judge trials per comparison (default from config)");
    eval->add_option("--out", eval_out, "write the win-rate matrix JSON here");
    add_common(eval, eval_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage problems are user errors
    }

    try {
        if (index->parsed()) return cmd_index(index_args, corpus_dir);
        if (query->parsed()) {
            if (query_level >= 0) condition = "c" + std::to_string(query_level);
            return cmd_query(query_args, condition, question, show_ledger);
        }
        if (inspect->parsed()) return cmd_inspect(inspect_args, level);
        if (questions->parsed()) {
            return cmd_questions(questions_args, description, n, questions_out);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_args, conditions_csv, metrics_csv, questions_path, trials,
                            eval_out);
        }
    } catch (const gs::InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const gs::Error& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

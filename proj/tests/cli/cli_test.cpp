// CLI behavior tests: exit codes, resume, inspect output. These shell out to
// the built binary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "../support/test_support.hpp"

namespace fs = std::filesystem;
using namespace graphsense;
using namespace graphsense::test;

namespace {

struct CliResult {
    int exit_code = 0;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string command = std::string(GRAPHSENSE_CLI) + " " + args + " 2>&1";
    std::string output;
    FILE* pipe = ::popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    while (std::size_t got = std::fread(buffer, 1, sizeof(buffer), pipe)) {
        output.append(buffer, got);
    }
    const int status = ::pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, std::move(output)};
}

struct Scratch {
    fs::path base;
    Scratch() {
        static int counter = 0;
        base = fs::temp_directory_path() /
               ("gs-cli-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(base);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(base, ec);
    }
};

fs::path write_corpus(const fs::path& dir, std::size_t docs) {
    fs::create_directories(dir);
    auto corpus = synthetic_corpus(docs, 7);
    for (const auto& doc : corpus) {
        std::ofstream out(dir / (doc.id + ".txt"), std::ios::binary);
        out << doc.text;
    }
    return dir;
}

} // namespace

TEST_CASE("index on a 3-file corpus exits 0 and completes all stages") {
    Scratch scratch;
    auto corpus = write_corpus(scratch.base / "corpus", 3);
    auto ws = (scratch.base / "ws").string();
    auto result = run_cli("index --corpus " + corpus.string() + " -w " + ws + " --seed 5");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("stage chunks:") != std::string::npos);
    CHECK(result.output.find("stage community_summaries:") != std::string::npos);
    CHECK(result.output.find("level  communities") != std::string::npos);
    CHECK(fs::exists(fs::path(ws) / "stages" / "chunks.jsonl"));
    CHECK(fs::exists(fs::path(ws) / "manifest.json"));
    CHECK(fs::exists(fs::path(ws) / "prompts" / "extract_graph.txt"));

    SUBCASE("re-running resumes without re-executing stages") {
        auto rerun = run_cli("index --corpus " + corpus.string() + " -w " + ws + " --seed 5");
        CHECK(rerun.exit_code == 0);
        CHECK(rerun.output.find("(resume)") != std::string::npos);
        // Every stage line reports resume.
        CHECK(rerun.output.find("stage extraction: complete (resume)") != std::string::npos);
    }

    SUBCASE("query answers under each condition") {
        for (const std::string condition : {"c0", "c1", "ts", "ss"}) {
            auto q = run_cli("query -w " + ws + " --condition " + condition +
                             " -q \"What are the main themes?\" --seed 5");
            CHECK(q.exit_code == 0);
            CHECK(!q.output.empty());
        }
    }

    SUBCASE("inspect lists one line per community") {
        auto inspect = run_cli("inspect -w " + ws + " --level 1");
        CHECK(inspect.exit_code == 0);
        CHECK(inspect.output.find("communities)") != std::string::npos);
        CHECK(inspect.output.find("tok") != std::string::npos);
    }

    SUBCASE("show-ledger prints token accounting") {
        auto q = run_cli("query -w " + ws +
                         " --condition c0 -q \"What are the themes?\" --seed 5 --show-ledger");
        CHECK(q.exit_code == 0);
        CHECK(q.output.find("context tokens consumed:") != std::string::npos);
        CHECK(fs::exists(fs::path(ws) / "reports" / "last_query.json"));
    }
}

TEST_CASE("an empty corpus directory fails naming the chunks stage") {
    Scratch scratch;
    fs::create_directories(scratch.base / "empty");
    auto result = run_cli("index --corpus " + (scratch.base / "empty").string() + " -w " +
                          (scratch.base / "ws").string());
    CHECK(result.exit_code != 0);
    CHECK(result.output.find("chunks") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    Scratch scratch;
    auto bad_condition = run_cli("query -w " + (scratch.base / "ws").string() +
                                 " --condition c9 -q hi");
    CHECK(bad_condition.exit_code == 1);

    auto no_subcommand = run_cli("");
    CHECK(no_subcommand.exit_code == 1);

    auto unknown_key = run_cli("index --corpus x -w y --set bogus.key=1");
    CHECK(unknown_key.exit_code == 1);
}

TEST_CASE("querying an unindexed workspace is a pipeline failure") {
    Scratch scratch;
    fs::create_directories(scratch.base / "ws");
    auto result = run_cli("query -w " + (scratch.base / "ws").string() +
                          " --condition c0 -q \"anything\"");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("index") != std::string::npos);
}

TEST_CASE("config file in the workspace is honored and validated") {
    Scratch scratch;
    auto corpus = write_corpus(scratch.base / "corpus", 2);
    auto ws = scratch.base / "ws";
    fs::create_directories(ws);
    {
        std::ofstream out(ws / "graphsense.toml");
        out << "[chunking]\nsize = 120\noverlap = 30\n";
    }
    auto result = run_cli("index --corpus " + corpus.string() + " -w " + ws.string());
    CHECK(result.exit_code == 0);

    {
        std::ofstream out(ws / "graphsense.toml");
        out << "[chunking]\nmystery = 1\n";
    }
    auto bad = run_cli("inspect -w " + ws.string() + " --level 0");
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("unknown config key") != std::string::npos);
}

TEST_CASE("questions and eval commands run end to end offline") {
    Scratch scratch;
    auto corpus = write_corpus(scratch.base / "corpus", 3);
    auto ws = (scratch.base / "ws").string();
    REQUIRE(run_cli("index --corpus " + corpus.string() + " -w " + ws + " --seed 5").exit_code ==
            0);

    auto questions_path = (scratch.base / "q.jsonl").string();
    auto questions = run_cli("questions -d \"synthetic reports corpus\" --n 2 -o " +
                             questions_path + " -w " + ws + " --seed 5");
    CHECK(questions.exit_code == 0);
    CHECK(questions.output.find("generated 8 questions") != std::string::npos);

    auto eval = run_cli("eval -w " + ws + " --conditions c0,ss --metrics comprehensiveness " +
                        "--questions " + questions_path + " --trials 5 --seed 5 --json");
    CHECK(eval.exit_code == 0);
    CHECK(eval.output.find("comprehensiveness") != std::string::npos);
    CHECK(fs::exists(fs::path(ws) / "reports" / "winrates.json"));
}

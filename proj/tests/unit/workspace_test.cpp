#include <doctest.h>

#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <nlohmann/json.hpp>

#include "graphsense/errors.hpp"
#include "graphsense/workspace/workspace.hpp"

using namespace graphsense;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gs-ws-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::vector<json> sample_records(int n) {
    std::vector<json> records;
    for (int i = 0; i < n; ++i) {
        records.push_back({{"id", i}, {"zeta", "value"}, {"alpha", i * 2}});
    }
    return records;
}

} // namespace

TEST_CASE("stages round-trip structurally") {
    TempDir dir;
    Workspace ws(dir.path);
    ws.save_stage("chunks", sample_records(3));
    auto loaded = ws.load_stage("chunks");
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[1]["alpha"] == 2);
    CHECK(ws.stage_complete("chunks"));
    CHECK(ws.stage_record_count("chunks") == 3);
}

TEST_CASE("stage files serialize with sorted keys, one record per line") {
    TempDir dir;
    Workspace ws(dir.path);
    ws.save_stage("chunks", sample_records(2));
    std::ifstream in(ws.stage_file("chunks"));
    std::string line;
    std::getline(in, line);
    CHECK(line == R"({"alpha":0,"id":0,"zeta":"value"})");
}

TEST_CASE("out-of-order writes fail with StageIncomplete") {
    TempDir dir;
    Workspace ws(dir.path);
    CHECK_THROWS_AS(ws.save_stage("extraction", sample_records(1)), StageIncomplete);
    CHECK_THROWS_AS(ws.load_stage("chunks"), StageIncomplete);
    ws.save_stage("chunks", sample_records(1));
    CHECK_NOTHROW(ws.save_stage("extraction", sample_records(1)));
    CHECK_NOTHROW(ws.save_stage("embeddings", sample_records(1))); // depends on chunks only
    CHECK_THROWS_AS(ws.save_stage("graph", sample_records(1)), StageIncomplete);
    CHECK_THROWS_AS(ws.save_stage("bogus_stage", sample_records(1)), InvalidConfig);
}

TEST_CASE("manual edits are detected as corruption") {
    TempDir dir;
    Workspace ws(dir.path);
    ws.save_stage("chunks", sample_records(2));
    {
        std::ofstream out(ws.stage_file("chunks"), std::ios::app);
        out << "{\"tampered\":true}\n";
    }
    CHECK_THROWS_AS(ws.load_stage("chunks"), CorruptStage);
}

TEST_CASE("re-saving a stage invalidates its dependents") {
    TempDir dir;
    Workspace ws(dir.path);
    ws.save_stage("chunks", sample_records(1));
    ws.save_stage("extraction", sample_records(1));
    ws.save_stage("element_summaries", sample_records(1));
    ws.save_stage("embeddings", sample_records(1));
    CHECK(ws.stage_complete("element_summaries"));

    ws.save_stage("chunks", sample_records(2)); // everything downstream resets
    CHECK_FALSE(ws.stage_complete("extraction"));
    CHECK_FALSE(ws.stage_complete("element_summaries"));
    CHECK_FALSE(ws.stage_complete("embeddings"));
    CHECK(ws.stage_complete("chunks"));
}

TEST_CASE("a crash mid-stage leaves the stage incomplete and redoable") {
    TempDir dir;
    {
        Workspace ws(dir.path);
        ws.save_stage("chunks", sample_records(1));
    }
    // Simulate a crash: a stage file written but never committed to the
    // manifest (the temp file survives, rename never happened).
    {
        std::ofstream out(dir.path / "stages" / "extraction.jsonl.tmp");
        out << "{\"partial\":true}\n";
    }
    Workspace resumed(dir.path);
    CHECK(resumed.stage_complete("chunks"));
    CHECK_FALSE(resumed.stage_complete("extraction"));
    CHECK_NOTHROW(resumed.save_stage("extraction", sample_records(1)));
}

TEST_CASE("byte determinism: same records, same bytes") {
    TempDir a_dir, b_dir;
    std::string a_bytes, b_bytes;
    {
        Workspace ws(a_dir.path);
        ws.save_stage("chunks", sample_records(5));
        std::ifstream in(ws.stage_file("chunks"), std::ios::binary);
        a_bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    {
        Workspace ws(b_dir.path);
        ws.save_stage("chunks", sample_records(5));
        std::ifstream in(ws.stage_file("chunks"), std::ios::binary);
        b_bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    CHECK(a_bytes == b_bytes);
}

TEST_CASE("the writer lock blocks a second live writer and clears on destruction") {
    TempDir dir;
    {
        Workspace first(dir.path);
        CHECK_THROWS_AS(Workspace{dir.path}, WorkspaceLocked);
    }
    CHECK_NOTHROW(Workspace{dir.path}); // lock released
}

TEST_CASE("a stale lock from a dead process is reclaimed") {
    TempDir dir;
    {
        std::ofstream out(dir.path / "ws.lock");
        out << 999999999 << "\n"; // no such pid
    }
    CHECK_NOTHROW(Workspace{dir.path});
}

TEST_CASE("config snapshots persist in the manifest") {
    TempDir dir;
    {
        Workspace ws(dir.path);
        ws.store_config_snapshot({{"seed", "42"}, {"llm.provider", "mock"}});
    }
    Workspace again(dir.path);
    auto snapshot = again.config_snapshot();
    CHECK(snapshot.at("seed") == "42");
    CHECK(snapshot.at("llm.provider") == "mock");
}

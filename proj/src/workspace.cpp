#include "graphsense/workspace/workspace.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#ifdef __unix__
#include <csignal>
#include <unistd.h>
#endif

#include "graphsense/errors.hpp"
#include "graphsense/util/hash.hpp"

namespace graphsense {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::pair<std::string, std::vector<std::string>>>& Workspace::stage_dag() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> kDag = {
        {"chunks", {}},
        {"extraction", {"chunks"}},
        {"element_summaries", {"extraction"}},
        {"graph", {"element_summaries"}},
        {"hierarchy", {"graph"}},
        {"community_summaries", {"hierarchy"}},
        {"embeddings", {"chunks"}},
    };
    return kDag;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CorruptStage("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw CorruptStage("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

bool pid_alive(long pid) {
#ifdef __unix__
    if (pid <= 0) return false;
    return ::kill(static_cast<pid_t>(pid), 0) == 0;
#else
    (void)pid;
    return false;
#endif
}

long own_pid() {
#ifdef __unix__
    return static_cast<long>(::getpid());
#else
    return 0;
#endif
}

} // namespace

Workspace::Workspace(fs::path root, bool acquire_lock) : root_(std::move(root)) {
    fs::create_directories(root_);
    fs::create_directories(root_ / "stages");
    fs::create_directories(root_ / "prompts");
    fs::create_directories(root_ / "reports");

    if (acquire_lock) {
        const fs::path lock_path = root_ / "ws.lock";
        if (fs::exists(lock_path)) {
            std::ifstream in(lock_path);
            long pid = 0;
            in >> pid;
            if (pid_alive(pid)) {
                throw WorkspaceLocked("workspace " + root_.string() +
                                      " is locked by running process " + std::to_string(pid));
            }
            fs::remove(lock_path); // stale lock from a dead process
        }
        std::ofstream out(lock_path, std::ios::trunc);
        out << own_pid() << "\n";
        locked_ = true;
    }
    load_manifest();
}

Workspace::~Workspace() {
    if (locked_) {
        std::error_code ec;
        fs::remove(root_ / "ws.lock", ec);
    }
}

fs::path Workspace::stage_file(const std::string& stage) const {
    return root_ / "stages" / (stage + ".jsonl");
}

void Workspace::require_known(const std::string& stage) const {
    for (const auto& [name, preds] : stage_dag()) {
        if (name == stage) return;
    }
    throw InvalidConfig("unknown stage: " + stage);
}

bool Workspace::stage_complete(const std::string& stage) const {
    return stages_.find(stage) != stages_.end();
}

std::uint64_t Workspace::save_stage(const std::string& stage,
                                    const std::vector<json>& records) {
    require_known(stage);
    for (const auto& [name, preds] : stage_dag()) {
        if (name != stage) continue;
        for (const auto& pred : preds) {
            if (!stage_complete(pred)) {
                throw StageIncomplete("stage '" + stage + "' requires completed stage '" + pred +
                                      "'");
            }
        }
    }

    std::string payload;
    for (const auto& record : records) {
        payload += record.dump(); // std::map-backed objects: keys sorted
        payload += '\n';
    }
    const std::uint64_t hash = fnv1a64(payload);
    write_file_atomic(stage_file(stage), payload);

    // Re-saving a stage invalidates everything downstream of it.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [name, preds] : stage_dag()) {
            if (!stage_complete(name)) continue;
            for (const auto& pred : preds) {
                if (pred == stage || !stage_complete(pred)) {
                    if (name != stage) {
                        stages_.erase(name);
                        changed = true;
                    }
                    break;
                }
            }
        }
    }

    stages_[stage] = {hex64(hash), records.size()};
    write_manifest();
    return hash;
}

std::vector<json> Workspace::load_stage(const std::string& stage) const {
    require_known(stage);
    auto it = stages_.find(stage);
    if (it == stages_.end()) {
        throw StageIncomplete("stage '" + stage + "' is not complete in this workspace");
    }

    std::ifstream in(stage_file(stage), std::ios::binary);
    if (!in) throw CorruptStage("stage file missing: " + stage_file(stage).string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string payload = buf.str();

    if (hex64(fnv1a64(payload)) != it->second.first) {
        throw CorruptStage("stage '" + stage + "' content does not match its recorded hash");
    }

    std::vector<json> records;
    std::istringstream lines(payload);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded()) {
            throw CorruptStage("stage '" + stage + "' contains an unparsable line");
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::size_t Workspace::stage_record_count(const std::string& stage) const {
    auto it = stages_.find(stage);
    return it == stages_.end() ? 0 : it->second.second;
}

void Workspace::store_config_snapshot(const std::map<std::string, std::string>& config) {
    config_snapshot_ = config;
    write_manifest();
}

std::map<std::string, std::string> Workspace::config_snapshot() const {
    return config_snapshot_;
}

void Workspace::write_report(const std::string& name, const std::string& content) const {
    write_file_atomic(reports_dir() / name, content);
}

void Workspace::load_manifest() {
    const fs::path path = root_ / "manifest.json";
    if (!fs::exists(path)) return;
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    json manifest = json::parse(buf.str(), nullptr, false);
    if (manifest.is_discarded() || !manifest.is_object()) {
        throw CorruptStage("manifest.json is unparsable in " + root_.string());
    }
    if (manifest.contains("stages")) {
        for (const auto& [name, entry] : manifest["stages"].items()) {
            stages_[name] = {entry.value("hash", ""), entry.value("records", std::size_t{0})};
        }
    }
    if (manifest.contains("config")) {
        for (const auto& [key, value] : manifest["config"].items()) {
            config_snapshot_[key] = value.get<std::string>();
        }
    }
}

void Workspace::write_manifest() const {
    json manifest;
    manifest["stages"] = json::object();
    for (const auto& [name, entry] : stages_) {
        manifest["stages"][name] = {{"hash", entry.first}, {"records", entry.second}};
    }
    manifest["config"] = json::object();
    for (const auto& [key, value] : config_snapshot_) manifest["config"][key] = value;
    write_file_atomic(root_ / "manifest.json", manifest.dump(2) + "\n");
}

} // namespace graphsense

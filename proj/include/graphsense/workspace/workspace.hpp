#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace graphsense {

// Stage-oriented persistent storage. Each stage is one JSON-Lines file under
// stages/ plus a manifest entry holding its content hash; a stage is readable
// only when its manifest flag exists and the hash still matches. Manifest
// updates are atomic (write-temp-then-rename), so a crash mid-stage leaves
// the stage absent from the manifest and a later run redoes it.
class Workspace {
public:
    // Stage names and their direct predecessors.
    static const std::vector<std::pair<std::string, std::vector<std::string>>>& stage_dag();

    // Opens (creating if needed) the workspace and takes the writer lock.
    // A lock held by a dead process is reclaimed; a live one raises
    // WorkspaceLocked.
    explicit Workspace(std::filesystem::path root, bool acquire_lock = true);
    ~Workspace();

    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path prompts_dir() const { return root_ / "prompts"; }
    std::filesystem::path reports_dir() const { return root_ / "reports"; }
    std::filesystem::path stage_file(const std::string& stage) const;

    bool stage_complete(const std::string& stage) const;

    // Serializes records (sorted keys, one per line), writes atomically,
    // records the hash, and clears every transitive dependent's completion
    // flag. Predecessors must be complete.
    std::uint64_t save_stage(const std::string& stage, const std::vector<nlohmann::json>& records);

    // Loads a completed stage, verifying the recorded content hash.
    std::vector<nlohmann::json> load_stage(const std::string& stage) const;

    // Stage record counts as recorded in the manifest (for reporting).
    std::size_t stage_record_count(const std::string& stage) const;

    // Config snapshot embedded in the manifest.
    void store_config_snapshot(const std::map<std::string, std::string>& config);
    std::map<std::string, std::string> config_snapshot() const;

    void write_report(const std::string& name, const std::string& content) const;

private:
    void load_manifest();
    void write_manifest() const;
    void require_known(const std::string& stage) const;

    std::filesystem::path root_;
    bool locked_ = false;
    std::map<std::string, std::pair<std::string, std::size_t>> stages_; // name -> (hash, records)
    std::map<std::string, std::string> config_snapshot_;
};

// Atomic file write used for stage files and the manifest.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace graphsense

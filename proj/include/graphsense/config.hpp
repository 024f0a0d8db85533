#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace graphsense {

enum class ConfigType { String, Int, Real, Bool };

struct ConfigEntry {
    std::string key;
    ConfigType type;
    std::string default_value;
    std::string description;
};

// Flat dotted-key configuration with a fixed schema: unknown keys are
// rejected, values are type-checked, every module default is reachable.
// Files use a minimal TOML-style syntax: optional [section] headers,
// key = value lines, # comments, quoted or bare values.
class Config {
public:
    static const std::vector<ConfigEntry>& schema();

    Config(); // defaults

    void apply_file(const std::filesystem::path& path);
    void set(const std::string& key, const std::string& value);
    bool has_explicit(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    double get_real(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<std::string> get_list(const std::string& key) const; // comma-separated

    std::map<std::string, std::string> values() const { return values_; }

private:
    const ConfigEntry& entry(const std::string& key) const;

    std::map<std::string, std::string> values_;
    std::map<std::string, bool> explicit_;
};

} // namespace graphsense
